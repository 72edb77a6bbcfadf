#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "batchsurf/mesh.hpp"

namespace batchsurf {

/// Binary little-endian PLY: float32 vertex x/y/z, uchar-counted int32
/// face indices. Byte-identical output for identical meshes.
std::vector<std::uint8_t> write_ply(const TriangleMesh& mesh);

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace batchsurf
