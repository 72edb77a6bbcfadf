#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "batchsurf/image.hpp"
#include "batchsurf/mesh.hpp"

namespace batchsurf {

/// One orthographic flat-shaded depth-buffered view of the mesh rotated
/// by angle_rad about the vertical axis through its centroid. The image
/// scale depends only on the mesh, not the angle, so frames of one
/// turntable align.
GrayImage render_mesh_view(const TriangleMesh& mesh, double angle_rad, int size = 256);

/// n_frames views at 360/n_frames degree steps, encoded as an animated
/// GIF. Throws SurfaceError(EmptyMeshRender) for an empty mesh.
std::vector<std::uint8_t> render_turntable(const TriangleMesh& mesh, int n_frames,
                                           int size = 256);

void save_turntable(const TriangleMesh& mesh, int n_frames,
                    const std::filesystem::path& path, int size = 256);

}  // namespace batchsurf
