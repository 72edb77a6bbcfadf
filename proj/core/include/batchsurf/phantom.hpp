#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "batchsurf/manifest.hpp"
#include "batchsurf/segmentation.hpp"
#include "batchsurf/vec3.hpp"
#include "batchsurf/volume.hpp"

namespace batchsurf {

struct Sphere {
    double radius_mm = 1.0;
};

/// Tube along z: outer radius, bore radius, axial length.
struct HollowCylinder {
    double r_outer_mm = 1.0;
    double r_inner_mm = 0.5;
    double length_mm = 1.0;
};

struct BoxShape {
    double wx_mm = 1.0, wy_mm = 1.0, wz_mm = 1.0;
};

using PhantomShape = std::variant<Sphere, HollowCylinder, BoxShape>;

/// Analytic solid with known geometry. With shell_mm == 0 voxels are
/// binary inside/outside by center sampling; with shell_mm > 0 the HU
/// ramps linearly from outside_hu to inside_hu across a band of that
/// width straddling the boundary, so the mid-value level set is exactly
/// the analytic surface.
struct PhantomSpec {
    PhantomShape shape;
    Vec3 center_mm{0, 0, 0};
    double inside_hu = 3000.0;
    double outside_hu = 0.0;
    double shell_mm = 0.0;
};

/// Signed distance to the shape boundary, negative inside.
double signed_distance(const PhantomSpec& spec, const Vec3& p_mm);

/// Half-extent of the shape along z, for clearance checks.
double z_half_extent(const PhantomShape& shape);

/// Samples the spec onto a grid with origin (0,0,0). Throws
/// PhantomError(ShapeOutOfBounds) when the shape does not fit.
ScanVolume rasterize(const PhantomSpec& spec, const std::array<int, 3>& dims,
                     const Vec3& spacing_mm);

struct PacketPhantom {
    std::string packet_id;
    std::array<int, 3> dims{0, 0, 0};
    Vec3 spacing_mm{1, 1, 1};
    std::vector<PhantomSpec> specs;  // ascending center z
    ReadDirection direction = ReadDirection::L2R;
};

struct BuiltPacket {
    ScanVolume volume;
    PacketEntry entry;                  // generated specimen ids
    std::vector<ChopBox> tight_boxes;   // ground truth, ascending z
};

/// Rasterizes every spec into one volume, generates the manifest entry,
/// and records each shape's tight voxel box. Throws
/// PhantomError(OverlapViolation) when two shapes' z-extents overlap.
BuiltPacket build_packet(const PacketPhantom& phantom);

void export_raw(const ScanVolume& vol, const std::filesystem::path& dir);

/// One file per slice, written with the minimal explicit-VR tag set the
/// series loader requires.
void export_dicom_series(const ScanVolume& vol, const std::filesystem::path& dir);

/// Encodes slice z of the volume as a single DICOM file. Stored values
/// are round((HU - intercept) / slope).
std::vector<std::uint8_t> encode_dicom_slice(const ScanVolume& vol, int z,
                                             double slope = 1.0, double intercept = 0.0);

}  // namespace batchsurf
