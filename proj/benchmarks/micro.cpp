#include <benchmark/benchmark.h>

#include "texlayer/editing.hpp"
#include "texlayer/layer_io.hpp"
#include "texlayer/octree.hpp"
#include "texlayer/procedural.hpp"

using namespace texlayer;

namespace {

struct TerrainScene {
  TriangleMesh mesh = make_terrain({.columns = 128, .rows = 64});
  Camera camera = Camera::look_at_perspective(Vec3(0.5, 0.25, 1.2), Vec3(0.5, 0.25, 0),
                                              Vec3(0, 1, 0), 45, 0.05, 10, 640, 480);
  DepthMap depth = render_depth(mesh, camera);
};

const TerrainScene& scene() {
  static const TerrainScene s;
  return s;
}

LayerSpec float_spec(int side) {
  LayerSpec s;
  s.name = "bench";
  s.element = ElementKind::kFloat32;
  s.width = side;
  s.height = side;
  return s;
}

void BM_TextureStroke(benchmark::State& state) {
  const TerrainScene& s = scene();
  const int side = static_cast<int>(state.range(0));
  TexturePool pool(4ull * side * side);
  InformationLayer layer = create_layer(pool, float_spec(side));
  const OutlineMask outline = build_outline_mask(s.mesh, side, side, 1);
  EditedAreaMask edited;
  const EditingTool tool = make_circle_tool(320, 240, static_cast<int>(state.range(1)), 1.0);
  for (auto _ : state) {
    const EditResult r = stroke_and_pad(s.mesh, s.camera, s.depth, tool, layer, outline, edited);
    benchmark::DoNotOptimize(r.edited.data());
  }
}
BENCHMARK(BM_TextureStroke)->ArgsProduct({{512, 1024, 2048}, {10, 70}})->Unit(benchmark::kMillisecond);

void BM_ParallelTextureStroke(benchmark::State& state) {
  const TerrainScene& s = scene();
  TexturePool pool;
  InformationLayer layer = create_layer(pool, float_spec(2048));
  StrokeOptions options;
  options.raster.backend = RasterBackend::kParallel;
  options.raster.threads = static_cast<unsigned>(state.range(0));
  const EditingTool tool = make_circle_tool(320, 240, 40, 1.0);
  for (auto _ : state) {
    const EditResult r = apply_stroke(s.mesh, s.camera, s.depth, tool, layer, options);
    benchmark::DoNotOptimize(r.edited.data());
  }
}
BENCHMARK(BM_ParallelTextureStroke)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_OctreeEdit(benchmark::State& state) {
  const TerrainScene& s = scene();
  const SurfaceOctree octree = build_octree(s.mesh, static_cast<int>(state.range(0)));
  OctreeLayer layer(octree, ElementKind::kFloat32);
  const EditingTool tool = make_circle_tool(320, 240, static_cast<int>(state.range(1)), 1.0);
  for (auto _ : state) {
    const OctreeEditResult r = octree_edit(octree, layer, s.mesh, s.camera, tool, 1.0);
    benchmark::DoNotOptimize(r.edited.data());
  }
}
BENCHMARK(BM_OctreeEdit)->ArgsProduct({{8, 9, 10}, {10, 70}})->Unit(benchmark::kMillisecond);

void BM_OctreeBuild(benchmark::State& state) {
  const TerrainScene& s = scene();
  for (auto _ : state) {
    const SurfaceOctree octree = build_octree(s.mesh, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(octree.leaf_count());
  }
}
BENCHMARK(BM_OctreeBuild)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DepthRender(benchmark::State& state) {
  const TerrainScene& s = scene();
  for (auto _ : state) {
    const DepthMap d = render_depth(s.mesh, s.camera);
    benchmark::DoNotOptimize(d.at(0, 0));
  }
}
BENCHMARK(BM_DepthRender)->Unit(benchmark::kMillisecond);

void BM_OutlineMask(benchmark::State& state) {
  const TerrainScene& s = scene();
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const OutlineMask o = build_outline_mask(s.mesh, side, side, 1);
    benchmark::DoNotOptimize(o.grid.cells.data());
  }
}
BENCHMARK(BM_OutlineMask)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_LayerSaveLoad(benchmark::State& state) {
  TexturePool pool;
  const InformationLayer layer = create_layer(pool, float_spec(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    const std::string bytes = save_layer(layer);
    const InformationLayer back = load_layer(bytes, pool);
    benchmark::DoNotOptimize(back.width());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(layer.data().bytes().size()));
}
BENCHMARK(BM_LayerSaveLoad)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
