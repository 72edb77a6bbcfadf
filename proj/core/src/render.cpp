#include "batchsurf/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "batchsurf/errors.hpp"
#include "batchsurf/gif.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

constexpr double kPi = 3.14159265358979323846;

/// cos/sin snapped to exact values at multiples of 90 degrees, so that
/// opposite turntable frames are exact point reflections of each other.
void snapped_trig(double angle, double& c, double& s) {
    c = std::cos(angle);
    s = std::sin(angle);
    const auto snap = [](double& v) {
        for (double target : {-1.0, 0.0, 1.0})
            if (std::abs(v - target) < 1e-12) v = target;
    };
    snap(c);
    snap(s);
}

struct Frame {
    Vec3 centroid;
    double half_extent;  // covers every rotation of the mesh
};

Frame frame_of(const TriangleMesh& mesh) {
    Frame f;
    for (const auto& v : mesh.vertices) f.centroid += v;
    f.centroid = f.centroid / static_cast<double>(mesh.vertices.size());
    double r_xy = 0.0, r_z = 0.0;
    for (const auto& v : mesh.vertices) {
        const Vec3 d = v - f.centroid;
        r_xy = std::max(r_xy, std::hypot(d.x, d.y));
        r_z = std::max(r_z, std::abs(d.z));
    }
    f.half_extent = std::max({r_xy, r_z, 1e-9});
    return f;
}

}  // namespace

GrayImage render_mesh_view(const TriangleMesh& mesh, double angle_rad, int size) {
    if (mesh.triangles.empty())
        throw SurfaceError(SurfaceErrc::EmptyMeshRender,
                           "cannot render empty mesh '" + mesh.name + "'");

    const Frame frame = frame_of(mesh);
    const double margin = size * 0.05;
    const double px_per_mm = (size * 0.5 - margin) / frame.half_extent;
    const double center = (size - 1) * 0.5;

    double c, s;
    snapped_trig(angle_rad, c, s);

    // Camera space: screen right = +x, screen up = +z, view along +y.
    // Rotation spins the mesh about the vertical axis through its
    // centroid.
    std::vector<Vec3> cam(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3 d = mesh.vertices[i] - frame.centroid;
        cam[i] = {c * d.x - s * d.y, s * d.x + c * d.y, d.z};
    }

    GrayImage img = make_image(size, size);
    std::vector<double> zbuf(static_cast<std::size_t>(size) * size,
                             std::numeric_limits<double>::infinity());
    const Vec3 light = normalized({-0.4, -0.7, 0.6});

    for (const auto& t : mesh.triangles) {
        const Vec3& a = cam[t[0]];
        const Vec3& b = cam[t[1]];
        const Vec3& d = cam[t[2]];

        // Screen positions relative to the image center, so a rotation
        // by 180 degrees mirrors them exactly; pixel centers sit at
        // integer - center, also exactly mirrorable.
        const double ax = a.x * px_per_mm, ay = -a.z * px_per_mm;
        const double bx = b.x * px_per_mm, by = -b.z * px_per_mm;
        const double dx = d.x * px_per_mm, dy = -d.z * px_per_mm;

        const double area2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax);
        if (area2 == 0.0) continue;  // edge-on or degenerate

        const Vec3 n = normalized(cross(b - a, d - a));
        const double lambert = std::abs(dot(n, light));
        const auto shade =
            static_cast<std::uint8_t>(std::lround(40.0 + 215.0 * std::clamp(lambert, 0.0, 1.0)));

        const auto lo_px = [&](double m) {
            return std::clamp(static_cast<int>(std::floor(m + center)), 0, size - 1);
        };
        const auto hi_px = [&](double m) {
            return std::clamp(static_cast<int>(std::ceil(m + center)), 0, size - 1);
        };
        const int u0 = lo_px(std::min({ax, bx, dx}));
        const int u1 = hi_px(std::max({ax, bx, dx}));
        const int v0 = lo_px(std::min({ay, by, dy}));
        const int v1 = hi_px(std::max({ay, by, dy}));

        for (int v = v0; v <= v1; ++v) {
            for (int u = u0; u <= u1; ++u) {
                const double px = u - center, py = v - center;
                const double e0 = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
                const double e1 = (dx - bx) * (py - by) - (dy - by) * (px - bx);
                const double e2 = (ax - dx) * (py - dy) - (ay - dy) * (px - dx);
                const bool inside = (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) ||
                                    (e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0);
                if (!inside) continue;
                // Barycentric depth along the view axis (+y, nearer is
                // smaller). e1 weights vertex a, e2 vertex b, e0 vertex d.
                const double depth = (e1 * a.y + e2 * b.y + e0 * d.y) / area2;
                const std::size_t pix = static_cast<std::size_t>(v) * size + u;
                if (depth < zbuf[pix]) {
                    zbuf[pix] = depth;
                    img.pixels[pix] = shade;
                }
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> render_turntable(const TriangleMesh& mesh, int n_frames, int size) {
    if (mesh.triangles.empty())
        throw SurfaceError(SurfaceErrc::EmptyMeshRender,
                           "cannot render empty mesh '" + mesh.name + "'");
    std::vector<GrayImage> frames;
    frames.reserve(n_frames);
    for (int k = 0; k < n_frames; ++k)
        frames.push_back(render_mesh_view(mesh, 2.0 * kPi * k / n_frames, size));
    return encode_gif(frames);
}

void save_turntable(const TriangleMesh& mesh, int n_frames, const std::filesystem::path& path,
                    int size) {
    detail::write_file(path, render_turntable(mesh, n_frames, size));
}

}  // namespace batchsurf
