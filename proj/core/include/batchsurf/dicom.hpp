#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "batchsurf/volume.hpp"

namespace batchsurf {

/// One parsed CT slice. Stored values are the raw pixel samples,
/// sign-extended per PixelRepresentation; HU conversion happens at
/// series-assembly time.
struct SliceRecord {
    int instance_number = 0;
    double position_z = 0.0;                    // mm, from ImagePositionPatient
    std::array<double, 2> position_xy{0.0, 0.0};  // mm
    std::array<double, 2> pixel_spacing{1.0, 1.0};  // (dx, dy) mm
    int rows = 0;
    int cols = 0;
    double rescale_slope = 1.0;
    double rescale_intercept = 0.0;
    std::map<std::string, std::string> acquisition_tags;  // KVP etc, pass-through
    std::vector<std::int32_t> pixels;           // size rows*cols, x fastest
};

/// Parses one file of the supported DICOM subset: 128-byte preamble +
/// "DICM", explicit-VR little-endian, uncompressed 16-bit PixelData.
/// `source_name` labels the file in error messages.
SliceRecord parse_dicom_file(const std::vector<std::uint8_t>& bytes,
                             const std::string& source_name = "<memory>");

/// Assembles slices into a volume: sorts by z (ties by instance number),
/// derives dz from the median consecutive gap, converts stored values to
/// HU via slope*stored + intercept.
ScanVolume load_series(const std::vector<std::vector<std::uint8_t>>& slice_files,
                       const std::string& packet_id = "");

ScanVolume assemble_series(std::vector<SliceRecord> slices, const std::string& packet_id);

/// Reads every regular file in `dir` as a DICOM slice.
ScanVolume load_dicom_dir(const std::filesystem::path& dir, const std::string& packet_id);

}  // namespace batchsurf
