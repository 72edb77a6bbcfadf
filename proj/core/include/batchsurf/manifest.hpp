#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace batchsurf {

/// How the packing list maps onto the scan: L2R means the list order
/// already matches ascending z; R2L means the packet went onto the bed
/// backwards and the list must be read in reverse.
enum class ReadDirection { L2R, R2L };

struct PacketEntry {
    std::string packet_id;
    ReadDirection direction = ReadDirection::L2R;
    std::vector<std::string> specimens;  // as written in the CSV
};

struct Manifest {
    std::vector<PacketEntry> packets;

    const PacketEntry* find(const std::string& packet_id) const;
};

/// Parses the packing-list CSV. Header must start with
/// `PacketID,CTHead2Tail`; the direction cell accepts L2R or R2L case
/// insensitively. Cells are trimmed, trailing empty cells dropped, fully
/// empty rows skipped. Throws ManifestError on a bad header, a bad
/// direction, an empty packet, a duplicate packet id, or a specimen
/// listed twice in one packet ("?" placeholders are exempt).
Manifest parse_manifest(const std::string& csv_text);

Manifest load_manifest(const std::filesystem::path& path);

/// Specimen ids in ascending-z order: as written for L2R, reversed for
/// R2L.
std::vector<std::string> assignment_order(const PacketEntry& entry);

}  // namespace batchsurf
