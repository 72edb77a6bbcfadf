#include "batchsurf/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "batchsurf/errors.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

/// Splits one CSV line, honoring double-quoted cells with "" escapes.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

}  // namespace

const PacketEntry* Manifest::find(const std::string& packet_id) const {
    for (const auto& p : packets)
        if (p.packet_id == packet_id) return &p;
    return nullptr;
}

Manifest parse_manifest(const std::string& csv_text) {
    const auto lines = split_lines(csv_text);
    if (lines.empty())
        throw ManifestError(ManifestErrc::BadHeader, "manifest: empty file");

    auto header = split_csv_row(lines[0]);
    for (auto& h : header) h = trim(h);
    if (header.size() < 2 || header[0] != "PacketID" || header[1] != "CTHead2Tail")
        throw ManifestError(ManifestErrc::BadHeader,
                            "manifest: header must start with PacketID,CTHead2Tail");
    for (std::size_t i = 2; i < header.size(); ++i) {
        const std::string expected = "Specimen" + std::to_string(i - 1);
        if (header[i] != expected)
            throw ManifestError(ManifestErrc::BadHeader,
                                "manifest: column " + std::to_string(i + 1) + " is '" +
                                    header[i] + "', expected '" + expected + "'");
    }

    Manifest manifest;
    std::set<std::string> seen_packets;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        auto cells = split_csv_row(lines[row]);
        for (auto& c : cells) c = trim(c);
        while (!cells.empty() && cells.back().empty()) cells.pop_back();
        if (cells.empty()) continue;

        const std::string rowno = "row " + std::to_string(row + 1);
        PacketEntry entry;
        entry.packet_id = cells[0];
        if (entry.packet_id.empty())
            throw ManifestError(ManifestErrc::EmptyPacket, "manifest: " + rowno + ": no packet id");
        if (!seen_packets.insert(entry.packet_id).second)
            throw ManifestError(ManifestErrc::DuplicatePacketId,
                                "manifest: " + rowno + ": duplicate packet id '" +
                                    entry.packet_id + "'");

        if (cells.size() < 2)
            throw ManifestError(ManifestErrc::BadDirection,
                                "manifest: " + rowno + ": missing direction cell");
        const std::string dir = upper(cells[1]);
        if (dir == "L2R")
            entry.direction = ReadDirection::L2R;
        else if (dir == "R2L")
            entry.direction = ReadDirection::R2L;
        else
            throw ManifestError(ManifestErrc::BadDirection,
                                "manifest: " + rowno + ": direction '" + cells[1] +
                                    "' is not L2R or R2L");

        std::set<std::string> seen_specimens;
        for (std::size_t i = 2; i < cells.size(); ++i) {
            if (cells[i].empty()) continue;
            if (cells[i] != "?" && !seen_specimens.insert(cells[i]).second)
                throw ManifestError(ManifestErrc::DuplicateSpecimen,
                                    "manifest: " + rowno + ": specimen '" + cells[i] +
                                        "' listed twice in packet '" + entry.packet_id + "'");
            entry.specimens.push_back(cells[i]);
        }
        if (entry.specimens.empty())
            throw ManifestError(ManifestErrc::EmptyPacket,
                                "manifest: " + rowno + ": packet '" + entry.packet_id +
                                    "' lists no specimens");
        manifest.packets.push_back(std::move(entry));
    }
    return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(detail::read_text_file(path));
}

std::vector<std::string> assignment_order(const PacketEntry& entry) {
    std::vector<std::string> order = entry.specimens;
    if (entry.direction == ReadDirection::R2L) std::reverse(order.begin(), order.end());
    return order;
}

}  // namespace batchsurf
