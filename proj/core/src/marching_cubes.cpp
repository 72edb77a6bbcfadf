#include "batchsurf/marching_cubes.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

#include "batchsurf/errors.hpp"
#include "mc_tables.hpp"

namespace batchsurf {

ScanVolume extract_subvolume(const ScanVolume& vol, const ChopBox& box) {
    if (box.x0 < 0 || box.y0 < 0 || box.z0 < 0 || box.x0 >= box.x1 || box.y0 >= box.y1 ||
        box.z0 >= box.z1 || box.x1 > vol.dims[0] || box.y1 > vol.dims[1] ||
        box.z1 > vol.dims[2])
        throw SurfaceError(SurfaceErrc::BoxOutOfRange,
                           "box [" + std::to_string(box.z0) + "," + std::to_string(box.z1) +
                               ")x[" + std::to_string(box.y0) + "," + std::to_string(box.y1) +
                               ")x[" + std::to_string(box.x0) + "," + std::to_string(box.x1) +
                               ") does not fit volume dims (" + std::to_string(vol.dims[0]) +
                               "," + std::to_string(vol.dims[1]) + "," +
                               std::to_string(vol.dims[2]) + ")");

    ScanVolume out;
    out.dims = {box.x1 - box.x0, box.y1 - box.y0, box.z1 - box.z0};
    out.spacing = vol.spacing;
    out.origin = {vol.origin[0] + box.x0 * vol.spacing[0],
                  vol.origin[1] + box.y0 * vol.spacing[1],
                  vol.origin[2] + box.z0 * vol.spacing[2]};
    out.metadata = vol.metadata;
    out.data.resize(out.voxel_count());
    for (int z = 0; z < out.dims[2]; ++z)
        for (int y = 0; y < out.dims[1]; ++y)
            std::memcpy(out.data.data() + out.index(0, y, z),
                        vol.data.data() + vol.index(box.x0, box.y0 + y, box.z0 + z),
                        static_cast<std::size_t>(out.dims[0]) * sizeof(float));
    return out;
}

namespace {

constexpr float kPadHu = -10000.0f;

// Exact-position dedup. The edge-indexed construction already shares
// crossing vertices; this catches the bit-identical duplicates that
// appear when a sample equals the iso value exactly (the crossing then
// sits on a grid corner shared by several edges).
std::uint64_t position_hash(const Vec3& v) {
    std::uint64_t b[3];
    std::memcpy(b, &v, sizeof(b));
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t w : b) {
        h ^= w;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

TriangleMesh marching_cubes(const ScanVolume& vol, const SurfaceParams& params) {
    const int pad = params.pad_closed ? 1 : 0;
    const int gx = vol.dims[0] + 2 * pad;
    const int gy = vol.dims[1] + 2 * pad;
    const int gz = vol.dims[2] + 2 * pad;
    const double iso = params.iso_hu;

    std::vector<float> grid;
    const float* g = nullptr;
    if (pad) {
        grid.assign(static_cast<std::size_t>(gx) * gy * gz, kPadHu);
        for (int z = 0; z < vol.dims[2]; ++z)
            for (int y = 0; y < vol.dims[1]; ++y)
                std::memcpy(grid.data() + (static_cast<std::size_t>(z + 1) * gy + (y + 1)) * gx + 1,
                            vol.data.data() + vol.index(0, y, z),
                            static_cast<std::size_t>(vol.dims[0]) * sizeof(float));
        g = grid.data();
    } else {
        g = vol.data.data();
    }
    const auto sample = [&](int x, int y, int z) {
        return g[(static_cast<std::size_t>(z) * gy + y) * gx + x];
    };

    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::int32_t> edge_vertex;

    const auto vertex_on_edge = [&](int cx, int cy, int cz, int edge) {
        const auto& corners = detail::kEdgeCorners[edge];
        const auto& oa = detail::kCornerOffset[corners[0]];
        const auto& ob = detail::kCornerOffset[corners[1]];
        const int ax = cx + oa[0], ay = cy + oa[1], az = cz + oa[2];
        const int bx = cx + ob[0], by = cy + ob[1], bz = cz + ob[2];

        const int axis = ax != bx ? 0 : (ay != by ? 1 : 2);
        const int lx = std::min(ax, bx), ly = std::min(ay, by), lz = std::min(az, bz);
        const std::uint64_t key =
            ((static_cast<std::uint64_t>(lz) * gy + ly) * gx + lx) * 3 + axis;
        const auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;

        const double va = sample(ax, ay, az);
        const double vb = sample(bx, by, bz);
        const double t = (iso - va) / (vb - va);
        const Vec3 pa{static_cast<double>(ax - pad), static_cast<double>(ay - pad),
                      static_cast<double>(az - pad)};
        const Vec3 pb{static_cast<double>(bx - pad), static_cast<double>(by - pad),
                      static_cast<double>(bz - pad)};
        const auto index = static_cast<std::int32_t>(mesh.vertices.size());
        mesh.vertices.push_back(pa + t * (pb - pa));
        edge_vertex.emplace(key, index);
        return index;
    };

    for (int cz = 0; cz + 1 < gz; ++cz) {
        for (int cy = 0; cy + 1 < gy; ++cy) {
            for (int cx = 0; cx + 1 < gx; ++cx) {
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    const auto& o = detail::kCornerOffset[c];
                    if (sample(cx + o[0], cy + o[1], cz + o[2]) >= iso) cube |= 1 << c;
                }
                if (cube == 0 || cube == 255) continue;
                const auto& row = detail::kTriTable[cube];
                // The case table assumes bits are set below the isovalue; with the
                // >= convention the emitted order must be flipped to keep normals
                // pointing out of the solid.
                for (int i = 0; row[i] != -1; i += 3) {
                    const std::int32_t a = vertex_on_edge(cx, cy, cz, row[i]);
                    const std::int32_t b = vertex_on_edge(cx, cy, cz, row[i + 1]);
                    const std::int32_t c = vertex_on_edge(cx, cy, cz, row[i + 2]);
                    mesh.triangles.push_back({a, c, b});
                }
            }
        }
    }

    if (mesh.triangles.empty())
        throw SurfaceError(SurfaceErrc::EmptyMesh,
                           "no isosurface at iso " + std::to_string(iso) + " in volume '" +
                               vol.metadata.packet_id + "'");

    // Weld coincident vertices, drop collapsed triangles, and compact to
    // the surviving references.
    std::unordered_map<std::uint64_t, std::vector<std::int32_t>> buckets;
    std::vector<std::int32_t> remap(mesh.vertices.size());
    std::vector<Vec3> welded;
    welded.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        auto& bucket = buckets[position_hash(mesh.vertices[i])];
        std::int32_t found = -1;
        for (std::int32_t cand : bucket)
            if (welded[cand] == mesh.vertices[i]) {
                found = cand;
                break;
            }
        if (found < 0) {
            found = static_cast<std::int32_t>(welded.size());
            welded.push_back(mesh.vertices[i]);
            bucket.push_back(found);
        }
        remap[i] = found;
    }

    std::vector<std::array<std::int32_t, 3>> kept;
    kept.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        const std::array<std::int32_t, 3> r{remap[t[0]], remap[t[1]], remap[t[2]]};
        if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
        kept.push_back(r);
    }

    TriangleMesh out;
    out.name = vol.metadata.packet_id;
    std::vector<std::int32_t> compact(welded.size(), -1);
    for (auto& t : kept) {
        for (auto& v : t) {
            if (compact[v] < 0) {
                compact[v] = static_cast<std::int32_t>(out.vertices.size());
                out.vertices.push_back(welded[v]);
            }
            v = compact[v];
        }
        out.triangles.push_back(t);
    }
    if (out.triangles.empty())
        throw SurfaceError(SurfaceErrc::EmptyMesh,
                           "isosurface at iso " + std::to_string(iso) +
                               " collapsed to zero area in volume '" + vol.metadata.packet_id +
                               "'");
    return out;
}

}  // namespace batchsurf
