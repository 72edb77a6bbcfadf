#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "batchsurf/image.hpp"
#include "batchsurf/manifest.hpp"
#include "batchsurf/volume.hpp"

namespace batchsurf {

/// Axis-aligned sub-volume bounds for one fragment, half-open voxel
/// index ranges on each axis.
struct ChopBox {
    std::string packet_id;
    int frag_index = 0;  // 0-based, ascending z
    std::string specimen_id;
    int z0 = 0, z1 = 0;
    int y0 = 0, y1 = 0;
    int x0 = 0, x1 = 0;

    bool operator==(const ChopBox&) const = default;
};

struct SegmentationParams {
    double threshold_hu = 2000.0;
    int padding_vox = 5;
    int min_component_vox = 50;
    int close_gap_vox = 3;
};

struct BinaryVolume {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<std::uint8_t> data;  // 0 or 1, x fastest

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x;
    }
};

/// Half-open slice range [z0, z1) of one connected occupancy run.
struct ZInterval {
    int z0 = 0;
    int z1 = 0;

    bool operator==(const ZInterval&) const = default;
};

/// Voxel true iff HU >= threshold.
BinaryVolume threshold_volume(const ScanVolume& vol, double threshold_hu);

/// Per-slice true-voxel counts along z.
std::vector<std::int64_t> project_occupancy(const BinaryVolume& bin);

/// Occupied-slice runs after closing gaps of <= close_gap_vox slices;
/// runs with total voxel mass < min_component_vox are dropped. Sorted by
/// z0.
std::vector<ZInterval> find_z_components(const std::vector<std::int64_t>& profile,
                                         const SegmentationParams& params);

struct ChopResult {
    std::vector<ChopBox> boxes;
    /// Set when component count != manifest specimen count; boxes then
    /// carry specimen_id "?".
    struct CountMismatch {
        int found = 0;
        int expected = 0;
    };
    std::optional<CountMismatch> mismatch;
};

/// Thresholds, finds z-runs, tightens x/y per slab, pads all six bounds
/// by padding_vox (clamped to the volume), and binds specimen ids in
/// assignment_order(entry).
ChopResult compute_chop_boxes(const ScanVolume& vol, const PacketEntry& entry,
                              const SegmentationParams& params);

/// Header `packet,frag_index,specimen_id,z0,z1,y0,y1,x0,x1`, rows sorted
/// by (packet, frag_index).
std::string write_chop_csv(const std::vector<ChopBox>& boxes);

/// Inverse of write_chop_csv. Throws ChopCsvError on a bad header, lo >=
/// hi bounds, or overlapping z-intervals within a packet.
std::vector<ChopBox> read_chop_csv(const std::string& text);

std::vector<ChopBox> load_chop_csv(const std::filesystem::path& path);

/// Salvaging parse for human-edited files: bad rows land in row_errors
/// (of two z-overlapping rows the later one is dropped), good rows are
/// kept. A bad header still throws.
struct ChopCsvParse {
    std::vector<ChopBox> boxes;
    std::vector<std::string> row_errors;
};
ChopCsvParse read_chop_csv_lenient(const std::string& text);

struct PreviewPair {
    GrayImage xz;  // projected along y
    GrayImage yz;  // projected along x
};

/// Maximum-intensity projections with HU window [-200, 2500] mapped to
/// [0, 255] and each box drawn as a 1-pixel bright rectangle outline.
PreviewPair render_preview(const ScanVolume& vol, const std::vector<ChopBox>& boxes);

}  // namespace batchsurf
