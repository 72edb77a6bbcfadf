#include <benchmark/benchmark.h>

#include <batchsurf/marching_cubes.hpp>
#include <batchsurf/mesh.hpp>
#include <batchsurf/phantom.hpp>
#include <batchsurf/segmentation.hpp>

using namespace batchsurf;

namespace {

/// Shell sphere filling most of an n^3 grid at 0.5 mm.
ScanVolume sphere_grid(int n) {
    const double extent = n * 0.5;
    PhantomSpec spec;
    spec.shape = Sphere{0.38 * extent};
    spec.center_mm = {extent / 2, extent / 2, extent / 2};
    spec.inside_hu = 3000.0;
    spec.outside_hu = 0.0;
    spec.shell_mm = 2.0;
    return rasterize(spec, {n, n, n}, {0.5, 0.5, 0.5});
}

/// Fragment-scale packet volume comparable to a real scan's chop box.
ScanVolume fragment_volume() {
    PhantomSpec spec;
    spec.shape = BoxShape{60, 60, 90};
    spec.center_mm = {32, 32, 48};
    spec.inside_hu = 3000.0;
    spec.outside_hu = 0.0;
    spec.shell_mm = 2.0;
    return rasterize(spec, {128, 128, 200}, {0.5, 0.5, 0.5});
}

void BM_MarchingCubes(benchmark::State& state) {
    const auto vol = sphere_grid(static_cast<int>(state.range(0)));
    const SurfaceParams params;
    for (auto _ : state) {
        auto mesh = marching_cubes(vol, params);
        benchmark::DoNotOptimize(mesh.vertices.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(vol.voxel_count()));
}
BENCHMARK(BM_MarchingCubes)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ThresholdAndProfile(benchmark::State& state) {
    const auto vol = fragment_volume();
    for (auto _ : state) {
        const auto bin = threshold_volume(vol, 2000.0);
        auto profile = project_occupancy(bin);
        benchmark::DoNotOptimize(profile.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(vol.voxel_count()));
}
BENCHMARK(BM_ThresholdAndProfile)->Unit(benchmark::kMillisecond);

void BM_PreviewRender(benchmark::State& state) {
    const auto vol = fragment_volume();
    const std::vector<ChopBox> boxes{{"bench", 0, "S1", 6, 186, 0, 128, 0, 128}};
    for (auto _ : state) {
        auto previews = render_preview(vol, boxes);
        benchmark::DoNotOptimize(previews.xz.pixels.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(vol.voxel_count()));
}
BENCHMARK(BM_PreviewRender)->Unit(benchmark::kMillisecond);

void BM_SurfaceFragment(benchmark::State& state) {
    const auto vol = fragment_volume();
    const ChopBox box{"bench", 0, "S1", 6, 186, 0, 128, 0, 128};
    const SurfaceParams params;
    for (auto _ : state) {
        const auto sub = extract_subvolume(vol, box);
        TriangleMesh mesh = marching_cubes(sub, params);
        mesh = scale_mesh(mesh, {sub.spacing[0], sub.spacing[1], sub.spacing[2]},
                          {sub.origin[0], sub.origin[1], sub.origin[2]});
        const MeshStats stats = compute_stats(mesh);
        benchmark::DoNotOptimize(stats.volume_mm3);
    }
    state.SetItemsProcessed(state.iterations() * 190LL * 128 * 128);
}
BENCHMARK(BM_SurfaceFragment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
