#include "batchsurf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace batchsurf {

MeshStats compute_stats(const TriangleMesh& mesh) {
    MeshStats s;
    s.n_vertices = static_cast<std::int64_t>(mesh.vertices.size());
    s.n_triangles = static_cast<std::int64_t>(mesh.triangles.size());

    if (!mesh.vertices.empty()) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        s.bbox_min = {inf, inf, inf};
        s.bbox_max = {-inf, -inf, -inf};
        for (const auto& v : mesh.vertices) {
            s.bbox_min = {std::min(s.bbox_min.x, v.x), std::min(s.bbox_min.y, v.y),
                          std::min(s.bbox_min.z, v.z)};
            s.bbox_max = {std::max(s.bbox_max.x, v.x), std::max(s.bbox_max.y, v.y),
                          std::max(s.bbox_max.z, v.z)};
        }
    }

    double area = 0.0;
    double signed_volume = 0.0;
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(mesh.triangles.size() * 3);
    const auto edge_key = [](std::int32_t a, std::int32_t b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };

    for (const auto& t : mesh.triangles) {
        const Vec3& v0 = mesh.vertices[t[0]];
        const Vec3& v1 = mesh.vertices[t[1]];
        const Vec3& v2 = mesh.vertices[t[2]];
        area += 0.5 * norm(cross(v1 - v0, v2 - v0));
        signed_volume += dot(v0, cross(v1, v2)) / 6.0;
        ++edge_count[edge_key(t[0], t[1])];
        ++edge_count[edge_key(t[1], t[2])];
        ++edge_count[edge_key(t[2], t[0])];
    }
    s.area_mm2 = area;
    s.volume_mm3 = std::abs(signed_volume);

    bool watertight = !mesh.triangles.empty();
    for (const auto& [key, count] : edge_count)
        if (count != 2) watertight = false;
    s.watertight = watertight;

    s.euler_characteristic = s.n_vertices - static_cast<std::int64_t>(edge_count.size()) +
                             s.n_triangles;
    return s;
}

TriangleMesh scale_mesh(const TriangleMesh& mesh, const Vec3& spacing, const Vec3& origin) {
    TriangleMesh out = mesh;
    for (auto& v : out.vertices) v = origin + scale(v, spacing);
    return out;
}

}  // namespace batchsurf
