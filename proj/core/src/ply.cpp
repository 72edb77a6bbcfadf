#include "batchsurf/ply.hpp"

#include <cstring>

#include "io_util.hpp"

namespace batchsurf {
namespace {

void push_f32(std::vector<std::uint8_t>& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

void push_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xff));
}

}  // namespace

std::vector<std::uint8_t> write_ply(const TriangleMesh& mesh) {
    std::string header =
        "ply\n"
        "format binary_little_endian 1.0\n"
        "element vertex " + std::to_string(mesh.vertices.size()) + "\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        "element face " + std::to_string(mesh.triangles.size()) + "\n"
        "property list uchar int vertex_indices\n"
        "end_header\n";

    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + mesh.vertices.size() * 12 + mesh.triangles.size() * 13);
    for (const auto& v : mesh.vertices) {
        push_f32(out, static_cast<float>(v.x));
        push_f32(out, static_cast<float>(v.y));
        push_f32(out, static_cast<float>(v.z));
    }
    for (const auto& t : mesh.triangles) {
        out.push_back(3);
        push_i32(out, t[0]);
        push_i32(out, t[1]);
        push_i32(out, t[2]);
    }
    return out;
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path) {
    detail::write_file(path, write_ply(mesh));
}

}  // namespace batchsurf
