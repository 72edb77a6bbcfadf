#pragma once

#include <array>
#include <string>
#include <vector>

#include "batchsurf/vec3.hpp"

namespace batchsurf {

/// Triangle soup with shared vertices. Triangles wind counter-clockwise
/// seen from outside the surface.
struct TriangleMesh {
    std::string name;  // specimen id
    std::vector<Vec3> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;

    bool empty() const { return triangles.empty(); }
};

struct MeshStats {
    std::int64_t n_vertices = 0;
    std::int64_t n_triangles = 0;
    Vec3 bbox_min{0, 0, 0};
    Vec3 bbox_max{0, 0, 0};
    double area_mm2 = 0.0;
    double volume_mm3 = 0.0;  // divergence-theorem, absolute value
    std::int64_t euler_characteristic = 0;
    bool watertight = false;  // every undirected edge on exactly 2 triangles
};

MeshStats compute_stats(const TriangleMesh& mesh);

/// Maps voxel-index coordinates to mm: v -> origin + v * spacing
/// component-wise.
TriangleMesh scale_mesh(const TriangleMesh& mesh, const Vec3& spacing, const Vec3& origin);

}  // namespace batchsurf
