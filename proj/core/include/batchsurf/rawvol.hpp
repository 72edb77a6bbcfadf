#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "batchsurf/volume.hpp"

namespace batchsurf {

/// Builds a volume from a JSON header (keys dims, spacing_mm, packet_id,
/// optional origin_mm) and an int16 little-endian payload, x fastest.
/// Values are HU directly (slope 1, intercept 0). Throws RawVolumeError
/// on a malformed header or a payload whose size != nx*ny*nz*2.
ScanVolume load_raw_volume(const std::string& header_text,
                           const std::vector<std::uint8_t>& payload);

/// Reads `<stem>.rawvol` plus its `<stem>.rawvol.json` sidecar.
ScanVolume load_raw_volume(const std::filesystem::path& rawvol_path);

/// Writes the payload and sidecar pair. HU values are rounded to the
/// nearest int16 (clamped to its range).
void save_raw_volume(const ScanVolume& vol, const std::filesystem::path& rawvol_path);

}  // namespace batchsurf
