#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace batchsurf {

struct ScanMetadata {
    enum class Source { DicomSeries, RawVolume };

    std::string packet_id;
    Source source = Source::RawVolume;
    double rescale_slope = 1.0;
    double rescale_intercept = 0.0;
    /// Acquisition tags (KV, MA, pitch, ...) carried through verbatim.
    /// Never consulted by any algorithm.
    std::map<std::string, std::string> acquisition_tags;
};

/// Uniform scalar grid in Hounsfield units. Data is row-major with x
/// fastest and z slowest; z is the bed axis (slice stacking direction).
/// Voxel (i,j,k) is centered at origin + (i*dx, j*dy, k*dz) mm.
struct ScanVolume {
    std::array<int, 3> dims{0, 0, 0};           // (nx, ny, nz)
    std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel
    std::array<double, 3> origin{0.0, 0.0, 0.0};   // mm, center of voxel (0,0,0)
    std::vector<float> data;                    // HU, size nx*ny*nz
    ScanMetadata metadata;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    std::size_t index(int x, int y, int z) const {
        assert(x >= 0 && x < dims[0] && y >= 0 && y < dims[1] && z >= 0 && z < dims[2]);
        return (static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x;
    }

    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }

    bool valid() const {
        return dims[0] >= 1 && dims[1] >= 1 && dims[2] >= 1 &&
               spacing[0] > 0.0 && spacing[1] > 0.0 && spacing[2] > 0.0 &&
               data.size() == voxel_count();
    }
};

}  // namespace batchsurf
