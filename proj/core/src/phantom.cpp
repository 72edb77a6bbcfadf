#include "batchsurf/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "batchsurf/errors.hpp"
#include "batchsurf/rawvol.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

struct Bounds {
    Vec3 lo, hi;  // mm
};

/// Axis-aligned bounds of the solid plus half the shell band.
Bounds shape_bounds(const PhantomSpec& spec) {
    const double pad = spec.shell_mm * 0.5;
    Vec3 half;
    if (const auto* s = std::get_if<Sphere>(&spec.shape)) {
        half = {s->radius_mm, s->radius_mm, s->radius_mm};
    } else if (const auto* c = std::get_if<HollowCylinder>(&spec.shape)) {
        half = {c->r_outer_mm, c->r_outer_mm, c->length_mm * 0.5};
    } else {
        const auto& b = std::get<BoxShape>(spec.shape);
        half = {b.wx_mm * 0.5, b.wy_mm * 0.5, b.wz_mm * 0.5};
    }
    half += Vec3{pad, pad, pad};
    return {spec.center_mm - half, spec.center_mm + half};
}

double shape_z_half_extent(const PhantomShape& shape) {
    if (const auto* s = std::get_if<Sphere>(&shape)) return s->radius_mm;
    if (const auto* c = std::get_if<HollowCylinder>(&shape)) return c->length_mm * 0.5;
    return std::get<BoxShape>(shape).wz_mm * 0.5;
}

void check_fits(const PhantomSpec& spec, const std::array<int, 3>& dims, const Vec3& spacing) {
    const Bounds b = shape_bounds(spec);
    const double ext[3] = {dims[0] * spacing.x, dims[1] * spacing.y, dims[2] * spacing.z};
    const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
    const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
    for (int a = 0; a < 3; ++a)
        if (lo[a] < 0.0 || hi[a] > ext[a])
            throw PhantomError(PhantomErrc::ShapeOutOfBounds,
                               "phantom: shape extends to [" + std::to_string(lo[a]) + ", " +
                                   std::to_string(hi[a]) + "] mm on axis " + std::to_string(a) +
                                   ", grid covers [0, " + std::to_string(ext[a]) + "]");
}

/// Writes the spec's HU into the volume over the voxel range its bounds
/// touch. Voxels outside the shell band keep their current value.
void splat(const PhantomSpec& spec, ScanVolume& vol) {
    const Bounds b = shape_bounds(spec);
    const auto lo_idx = [&](double v, double d, int n) {
        return std::clamp(static_cast<int>(std::floor(v / d)) - 1, 0, n - 1);
    };
    const auto hi_idx = [&](double v, double d, int n) {
        return std::clamp(static_cast<int>(std::ceil(v / d)) + 1, 0, n - 1);
    };
    const int x0 = lo_idx(b.lo.x, vol.spacing[0], vol.dims[0]);
    const int x1 = hi_idx(b.hi.x, vol.spacing[0], vol.dims[0]);
    const int y0 = lo_idx(b.lo.y, vol.spacing[1], vol.dims[1]);
    const int y1 = hi_idx(b.hi.y, vol.spacing[1], vol.dims[1]);
    const int z0 = lo_idx(b.lo.z, vol.spacing[2], vol.dims[2]);
    const int z1 = hi_idx(b.hi.z, vol.spacing[2], vol.dims[2]);

    for (int z = z0; z <= z1; ++z) {
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec3 p{x * vol.spacing[0], y * vol.spacing[1], z * vol.spacing[2]};
                const double sd = signed_distance(spec, p);
                if (spec.shell_mm > 0.0) {
                    const double t = std::clamp(0.5 - sd / spec.shell_mm, 0.0, 1.0);
                    if (t > 0.0)
                        vol.at(x, y, z) = static_cast<float>(
                            spec.outside_hu + (spec.inside_hu - spec.outside_hu) * t);
                } else if (sd <= 0.0) {
                    vol.at(x, y, z) = static_cast<float>(spec.inside_hu);
                }
            }
        }
    }
}

ChopBox tight_box(const PhantomSpec& spec, const ScanVolume& vol, const std::string& packet_id,
                  int frag_index, const std::string& specimen_id) {
    const Bounds b = shape_bounds(spec);
    ChopBox box;
    box.packet_id = packet_id;
    box.frag_index = frag_index;
    box.specimen_id = specimen_id;
    box.x0 = vol.dims[0];
    box.y0 = vol.dims[1];
    box.z0 = vol.dims[2];

    const int zlo = std::clamp(static_cast<int>(std::floor(b.lo.z / vol.spacing[2])) - 1, 0,
                               vol.dims[2] - 1);
    const int zhi = std::clamp(static_cast<int>(std::ceil(b.hi.z / vol.spacing[2])) + 1, 0,
                               vol.dims[2] - 1);
    bool any = false;
    for (int z = zlo; z <= zhi; ++z) {
        for (int y = 0; y < vol.dims[1]; ++y) {
            for (int x = 0; x < vol.dims[0]; ++x) {
                const Vec3 p{x * vol.spacing[0], y * vol.spacing[1], z * vol.spacing[2]};
                if (signed_distance(spec, p) > 0.0) continue;
                any = true;
                box.x0 = std::min(box.x0, x);
                box.x1 = std::max(box.x1, x + 1);
                box.y0 = std::min(box.y0, y);
                box.y1 = std::max(box.y1, y + 1);
                box.z0 = std::min(box.z0, z);
                box.z1 = std::max(box.z1, z + 1);
            }
        }
    }
    if (!any)
        throw PhantomError(PhantomErrc::ShapeOutOfBounds,
                           "phantom: no voxel center falls inside shape " +
                               std::to_string(frag_index) + " of packet '" + packet_id + "'");
    return box;
}

}  // namespace

double signed_distance(const PhantomSpec& spec, const Vec3& p_mm) {
    const Vec3 p = p_mm - spec.center_mm;
    if (const auto* s = std::get_if<Sphere>(&spec.shape)) {
        return norm(p) - s->radius_mm;
    }
    if (const auto* c = std::get_if<HollowCylinder>(&spec.shape)) {
        // Cross-section in the (radius, z) half-plane is the rectangle
        // [r_inner, r_outer] x [-L/2, L/2]; revolve its 2-D distance.
        const double rho = std::hypot(p.x, p.y);
        const double dr = std::max(rho - c->r_outer_mm, c->r_inner_mm - rho);
        const double dz = std::abs(p.z) - c->length_mm * 0.5;
        const double ox = std::max(dr, 0.0);
        const double oz = std::max(dz, 0.0);
        return std::min(std::max(dr, dz), 0.0) + std::hypot(ox, oz);
    }
    const auto& b = std::get<BoxShape>(spec.shape);
    const double qx = std::abs(p.x) - b.wx_mm * 0.5;
    const double qy = std::abs(p.y) - b.wy_mm * 0.5;
    const double qz = std::abs(p.z) - b.wz_mm * 0.5;
    const double ox = std::max(qx, 0.0);
    const double oy = std::max(qy, 0.0);
    const double oz = std::max(qz, 0.0);
    const double outside = std::sqrt(ox * ox + oy * oy + oz * oz);
    return std::min(std::max({qx, qy, qz}), 0.0) + outside;
}

double z_half_extent(const PhantomShape& shape) { return shape_z_half_extent(shape); }

ScanVolume rasterize(const PhantomSpec& spec, const std::array<int, 3>& dims,
                     const Vec3& spacing_mm) {
    check_fits(spec, dims, spacing_mm);
    ScanVolume vol;
    vol.dims = dims;
    vol.spacing = {spacing_mm.x, spacing_mm.y, spacing_mm.z};
    vol.data.assign(vol.voxel_count(), static_cast<float>(spec.outside_hu));
    splat(spec, vol);
    return vol;
}

BuiltPacket build_packet(const PacketPhantom& phantom) {
    if (phantom.specs.empty())
        throw PhantomError(PhantomErrc::ShapeOutOfBounds,
                           "phantom: packet '" + phantom.packet_id + "' has no shapes");

    auto order = phantom.specs;
    std::sort(order.begin(), order.end(),
              [](const PhantomSpec& a, const PhantomSpec& b) {
                  return a.center_mm.z < b.center_mm.z;
              });
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double hi = order[i].center_mm.z + z_half_extent(order[i].shape) +
                          order[i].shell_mm * 0.5;
        const double lo = order[i + 1].center_mm.z - z_half_extent(order[i + 1].shape) -
                          order[i + 1].shell_mm * 0.5;
        if (hi >= lo)
            throw PhantomError(PhantomErrc::OverlapViolation,
                               "phantom: shapes " + std::to_string(i) + " and " +
                                   std::to_string(i + 1) + " of packet '" + phantom.packet_id +
                                   "' overlap along z");
    }

    BuiltPacket built;
    built.volume.dims = phantom.dims;
    built.volume.spacing = {phantom.spacing_mm.x, phantom.spacing_mm.y, phantom.spacing_mm.z};
    built.volume.metadata.packet_id = phantom.packet_id;
    built.volume.data.assign(built.volume.voxel_count(),
                             static_cast<float>(order.front().outside_hu));
    for (const auto& spec : order) {
        check_fits(spec, phantom.dims, phantom.spacing_mm);
        splat(spec, built.volume);
    }

    std::vector<std::string> ids_by_z(order.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        ids_by_z[k] = phantom.packet_id + "_" + std::to_string(k + 1);

    built.entry.packet_id = phantom.packet_id;
    built.entry.direction = phantom.direction;
    built.entry.specimens = ids_by_z;
    if (phantom.direction == ReadDirection::R2L)
        std::reverse(built.entry.specimens.begin(), built.entry.specimens.end());

    for (std::size_t k = 0; k < order.size(); ++k)
        built.tight_boxes.push_back(tight_box(order[k], built.volume, phantom.packet_id,
                                              static_cast<int>(k), ids_by_z[k]));
    return built;
}

void export_raw(const ScanVolume& vol, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_raw_volume(vol, dir / (vol.metadata.packet_id + ".rawvol"));
}

namespace {

void push_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

/// Explicit-VR element with a short (2-byte) length field. ASCII values
/// are padded to even length with a space, UI with NUL.
void push_element(std::vector<std::uint8_t>& out, std::uint16_t group, std::uint16_t element,
                  const char vr[2], std::vector<std::uint8_t> value) {
    if (value.size() % 2 != 0) value.push_back(vr[0] == 'U' && vr[1] == 'I' ? '\0' : ' ');
    push_u16(out, group);
    push_u16(out, element);
    out.push_back(static_cast<std::uint8_t>(vr[0]));
    out.push_back(static_cast<std::uint8_t>(vr[1]));
    push_u16(out, static_cast<std::uint16_t>(value.size()));
    out.insert(out.end(), value.begin(), value.end());
}

std::vector<std::uint8_t> ascii_bytes(const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::string format_ds(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::uint8_t> encode_dicom_slice(const ScanVolume& vol, int z, double slope,
                                             double intercept) {
    std::vector<std::uint8_t> out(128, 0);
    for (char c : {'D', 'I', 'C', 'M'}) out.push_back(static_cast<std::uint8_t>(c));

    std::vector<std::uint8_t> meta;
    push_element(meta, 0x0002, 0x0010, "UI", ascii_bytes("1.2.840.10008.1.2.1"));
    {
        std::vector<std::uint8_t> len;
        push_u32(len, static_cast<std::uint32_t>(meta.size()));
        push_element(out, 0x0002, 0x0000, "UL", len);
    }
    out.insert(out.end(), meta.begin(), meta.end());

    const auto tag = [&](const char* key) {
        auto it = vol.metadata.acquisition_tags.find(key);
        return it == vol.metadata.acquisition_tags.end() ? std::string() : it->second;
    };
    if (const auto kvp = tag("KVP"); !kvp.empty())
        push_element(out, 0x0018, 0x0060, "DS", ascii_bytes(kvp));
    if (const auto ma = tag("XRayTubeCurrent"); !ma.empty())
        push_element(out, 0x0018, 0x1151, "IS", ascii_bytes(ma));

    push_element(out, 0x0020, 0x0013, "IS", ascii_bytes(std::to_string(z + 1)));
    const std::string position = format_ds(vol.origin[0]) + "\\" + format_ds(vol.origin[1]) +
                                 "\\" + format_ds(vol.origin[2] + z * vol.spacing[2]);
    push_element(out, 0x0020, 0x0032, "DS", ascii_bytes(position));

    std::vector<std::uint8_t> u16buf;
    push_u16(u16buf, static_cast<std::uint16_t>(vol.dims[1]));
    push_element(out, 0x0028, 0x0010, "US", u16buf);  // Rows
    u16buf.clear();
    push_u16(u16buf, static_cast<std::uint16_t>(vol.dims[0]));
    push_element(out, 0x0028, 0x0011, "US", u16buf);  // Columns

    // PixelSpacing stores row spacing (dy) first.
    push_element(out, 0x0028, 0x0030, "DS",
                 ascii_bytes(format_ds(vol.spacing[1]) + "\\" + format_ds(vol.spacing[0])));

    u16buf.clear();
    push_u16(u16buf, 16);
    push_element(out, 0x0028, 0x0100, "US", u16buf);  // BitsAllocated
    u16buf.clear();
    push_u16(u16buf, 1);
    push_element(out, 0x0028, 0x0103, "US", u16buf);  // PixelRepresentation, signed

    push_element(out, 0x0028, 0x1052, "DS", ascii_bytes(format_ds(intercept)));
    push_element(out, 0x0028, 0x1053, "DS", ascii_bytes(format_ds(slope)));

    const std::size_t n = static_cast<std::size_t>(vol.dims[0]) * vol.dims[1];
    push_u16(out, 0x7FE0);
    push_u16(out, 0x0010);
    out.push_back('O');
    out.push_back('W');
    push_u16(out, 0);  // reserved
    push_u32(out, static_cast<std::uint32_t>(n * 2));
    const float* slice = vol.data.data() + static_cast<std::size_t>(z) * n;
    for (std::size_t i = 0; i < n; ++i) {
        const double stored = std::clamp(std::round((slice[i] - intercept) / slope),
                                         -32768.0, 32767.0);
        push_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(stored)));
    }
    return out;
}

void export_dicom_series(const ScanVolume& vol, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (int z = 0; z < vol.dims[2]; ++z) {
        char name[32];
        std::snprintf(name, sizeof(name), "slice_%04d.dcm", z);
        detail::write_file(dir / name, encode_dicom_slice(vol, z));
    }
}

}  // namespace batchsurf
