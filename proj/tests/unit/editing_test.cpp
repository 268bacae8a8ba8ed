#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "oracles.hpp"
#include "texlayer/editing.hpp"
#include "texlayer/error.hpp"
#include "texlayer/procedural.hpp"

using namespace texlayer;

namespace {

LayerSpec spec(int side, ElementKind element = ElementKind::kInt16) {
  LayerSpec s;
  s.name = "edit";
  s.element = element;
  s.width = side;
  s.height = side;
  s.limits = {0, 100};
  return s;
}

std::vector<std::uint32_t> masked(const InformationLayer& layer) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < layer.mask().texel_count(); ++i)
    if (layer.mask().value(i) != 0) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

BoolGrid grid_of(const std::vector<std::uint32_t>& idx, int w, int h) {
  BoolGrid g(w, h);
  for (std::uint32_t i : idx) g.cells[i] = 1;
  return g;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

// Square of side 2 in z = 0 seen head-on so that it fills a square viewport.
struct FrontQuad {
  TriangleMesh mesh = make_flat_square(2.0, 0.0, 4);
  Camera cam = Camera::look_at_orthographic(Vec3(0, 0, 3), Vec3(0, 0, 0), Vec3(0, 1, 0), 1.0,
                                            0.5, 10, 128, 128);
  DepthMap depth = render_depth(mesh, cam);
};

}  // namespace

TEST(ApplyStroke, FullViewportQuadMatchesOracle) {
  FrontQuad s;
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(128));
  // Off the half-pixel lattice: here texel centers land exactly on pixel
  // centers, and a centered tool would put them on shape cell borders.
  const EditingTool tool = make_circle_tool(64.3, 63.8, 10, 42);
  const EditResult r = apply_stroke(s.mesh, s.cam, s.depth, tool, layer);
  const auto want = oracle::edited_texels(s.mesh, s.cam, s.depth, tool, 128, 128, 1e-4);
  EXPECT_EQ(r.edited, want);
  EXPECT_GE(r.edited.size(), circle_shape(10).count());
  EXPECT_EQ(r.transfer_bytes, 64u);
  EXPECT_EQ(masked(layer), r.edited);
  for (std::uint32_t i : r.edited) EXPECT_EQ(layer.data().value(i), 42);
}

TEST(ApplyStroke, ToolOverBackgroundEditsNothing) {
  const TriangleMesh mesh = make_flat_square(0.5);
  const Camera cam = Camera::look_at_perspective(Vec3(0, 0, 3), Vec3(0, 0, 0), Vec3(0, 1, 0), 45,
                                                 0.1, 10, 200, 200);
  const DepthMap depth = render_depth(mesh, cam);
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(64));
  const EditResult r = apply_stroke(mesh, cam, depth, make_circle_tool(15, 15, 10, 5), layer);
  EXPECT_TRUE(r.edited.empty());
  EXPECT_GT(r.fragments_visited, 0u);
  EXPECT_EQ(layer.valid_texels(), 0u);
  EXPECT_TRUE(r.dirty.empty());
}

TEST(ApplyStroke, OccludedQuadIsNeverEdited) {
  const TriangleMesh mesh = make_coaxial_quads(2.0, 0.0, -1.0, 3);
  const Camera cam = Camera::look_at_perspective(Vec3(0.2, -0.1, 4), Vec3(0, 0, 0), Vec3(0, 1, 0),
                                                 40, 0.1, 20, 160, 120);
  const DepthMap depth = render_depth(mesh, cam);
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(128));
  EditedAreaMask edited;
  gen::Rng rng(6);
  for (int i = 0; i < 60; ++i) {
    const EditingTool tool = make_circle_tool(gen::uniform(rng, 0, 160), gen::uniform(rng, 0, 120),
                                              gen::uniform_int(rng, 1, 40), 1);
    const EditResult r = apply_stroke(mesh, cam, depth, tool, layer, edited);
    EXPECT_EQ(r.edited, oracle::edited_texels(mesh, cam, depth, tool, 128, 128, 1e-4));
    for (std::uint32_t t : r.edited) ASSERT_LT((t % 128 + 0.5) / 128.0, kCoaxialFrontUMax);
  }
  EXPECT_GT(layer.valid_texels(), 0u);
}

TEST(ApplyStroke, RandomScenesMatchOracle) {
  gen::Rng rng(1234);
  TexturePool pool;
  for (int scene = 0; scene < 15; ++scene) {
    const TriangleMesh mesh = gen::random_scene(rng);
    const Camera cam = gen::random_camera(rng);
    const DepthMap depth = render_depth(mesh, cam);
    const int side = scene % 3 == 0 ? 100 : 128;
    InformationLayer layer = create_layer(pool, spec(side));
    for (int k = 0; k < 3; ++k) {
      const EditingTool tool = gen::random_tool(rng, cam);
      const EditResult r = apply_stroke(mesh, cam, depth, tool, layer);
      ASSERT_EQ(r.edited, oracle::edited_texels(mesh, cam, depth, tool, side, side, 1e-4))
          << "scene " << scene << " stroke " << k;
    }
  }
}

TEST(ApplyStroke, OcclusionSafety) {
  gen::Rng rng(808);
  TexturePool pool;
  const double bias = 1e-4;
  for (int scene = 0; scene < 10; ++scene) {
    const TriangleMesh mesh = gen::random_scene(rng);
    const Camera cam = gen::random_camera(rng);
    const DepthMap depth = render_depth(mesh, cam);
    InformationLayer layer = create_layer(pool, spec(96));
    const EditResult r = apply_stroke(mesh, cam, depth, gen::random_tool(rng, cam), layer);
    const auto uv = mesh.uvs();
    const auto pos = mesh.positions();
    for (std::uint32_t t : r.edited) {
      const int x = static_cast<int>(t % 96);
      const int y = static_cast<int>(t / 96);
      bool some_visible = false;
      for (const Triangle& tri : mesh.triangles()) {
        const auto w = oracle::cover(uv[tri[0]] * 96, uv[tri[1]] * 96, uv[tri[2]] * 96, x + 0.5L,
                                     y + 0.5L);
        if (!w) continue;
        const Vec3 p = static_cast<double>((*w)[0]) * pos[tri[0]] +
                       static_cast<double>((*w)[1]) * pos[tri[1]] +
                       static_cast<double>((*w)[2]) * pos[tri[2]];
        const auto win = project_to_window(cam, p);
        if (!win || win->x() < 0 || win->y() < 0 || win->x() >= cam.width ||
            win->y() >= cam.height)
          continue;
        some_visible |= win->z() <= depth.at(static_cast<int>(win->x()),
                                             static_cast<int>(win->y())) + bias + 1e-9;
      }
      ASSERT_TRUE(some_visible) << "scene " << scene << " texel " << t;
    }
  }
}

TEST(ApplyStroke, Idempotent) {
  gen::Rng rng(77);
  TexturePool pool;
  for (int scene = 0; scene < 5; ++scene) {
    const TriangleMesh mesh = gen::random_scene(rng);
    const Camera cam = gen::random_camera(rng);
    const DepthMap depth = render_depth(mesh, cam);
    InformationLayer once = create_layer(pool, spec(128));
    InformationLayer twice = create_layer(pool, spec(128));
    const EditingTool tool = gen::random_tool(rng, cam);
    apply_stroke(mesh, cam, depth, tool, once);
    apply_stroke(mesh, cam, depth, tool, twice);
    apply_stroke(mesh, cam, depth, tool, twice);
    EXPECT_EQ(once.data(), twice.data());
    EXPECT_EQ(once.mask(), twice.mask());
  }
}

TEST(ApplyStroke, FragmentCountIndependentOfRadius) {
  FrontQuad s;
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(128));
  const std::uint64_t covered = uv_coverage(s.mesh, 128).count();
  std::set<std::uint64_t> counts;
  for (int r : {1, 10, 40, 70, 100, 200}) {
    const EditResult res = apply_stroke(s.mesh, s.cam, s.depth, make_circle_tool(64, 64, r, 3), layer);
    counts.insert(res.fragments_visited);
  }
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(*counts.begin(), covered);
}

TEST(ApplyStroke, BackendsAgree) {
  gen::Rng rng(41);
  TexturePool pool;
  for (int scene = 0; scene < 4; ++scene) {
    const TriangleMesh mesh = gen::random_scene(rng);
    const Camera cam = gen::random_camera(rng);
    const DepthMap depth = render_depth(mesh, cam);
    const EditingTool tool = gen::random_tool(rng, cam);
    InformationLayer a = create_layer(pool, spec(128, ElementKind::kInt32));
    InformationLayer b = create_layer(pool, spec(128, ElementKind::kInt32));
    StrokeOptions par;
    par.raster = {RasterBackend::kParallel, 3};
    const EditResult ra = apply_stroke(mesh, cam, depth, tool, a);
    const EditResult rb = apply_stroke(mesh, cam, depth, tool, b, par);
    EXPECT_EQ(ra.edited, rb.edited);
    EXPECT_EQ(a.data(), b.data());
    EXPECT_EQ(a.mask(), b.mask());
  }
}

TEST(ApplyStroke, StaleDepthIsRejected) {
  FrontQuad s;
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(32));
  Camera moved = s.cam;
  moved.view(0, 3) += 0.1;
  EXPECT_EQ(code_of([&] { apply_stroke(s.mesh, moved, s.depth, make_circle_tool(5, 5, 2, 1), layer); }),
            ErrorCode::kStaleDepth);
  const TriangleMesh other = make_flat_square(2.0, 0.0, 4);
  EXPECT_EQ(code_of([&] { apply_stroke(other, s.cam, s.depth, make_circle_tool(5, 5, 2, 1), layer); }),
            ErrorCode::kStaleDepth);
}

TEST(ApplyStroke, NoCoverageIsLayerMeshMismatch) {
  TriangleMesh::Data d;
  d.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  d.uvs = {Vec2(0.01, 0.01), Vec2(0.05, 0.01), Vec2(0.01, 0.05)};
  d.triangles = {{0, 1, 2}};
  const TriangleMesh mesh = TriangleMesh::build(d);
  const Camera cam = Camera::look_at_orthographic(Vec3(0.3, 0.3, 2), Vec3(0.3, 0.3, 0),
                                                  Vec3(0, 1, 0), 1, 0.1, 5, 16, 16);
  const DepthMap depth = render_depth(mesh, cam);
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(4));
  EXPECT_EQ(code_of([&] { apply_stroke(mesh, cam, depth, make_circle_tool(8, 8, 3, 1), layer); }),
            ErrorCode::kLayerMeshMismatch);
}

TEST(Outline, Examples) {
  EXPECT_EQ(build_outline_mask(make_flat_square(), 64, 64).grid.count(), 0u);
  const TriangleMesh island = make_plane(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), 1,
                                         Vec2(20 / 64.0, 20 / 64.0), Vec2(30 / 64.0, 30 / 64.0));
  EXPECT_EQ(build_outline_mask(island, 64, 64, 1).grid.count(), 44u);
  EXPECT_EQ(build_outline_mask(island, 64, 64, 2).grid.count(), 14u * 14u - 100u);
  TriangleMesh::Data none;
  EXPECT_EQ(build_outline_mask(TriangleMesh::build(none), 16, 16).grid.count(), 0u);
}

TEST(Outline, MatchesOracleAndAvoidsCoverage) {
  gen::Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const TriangleMesh mesh = i % 2 ? gen::random_islands(rng, gen::uniform_int(rng, 1, 8))
                                    : gen::random_scene(rng);
    const int k = gen::uniform_int(rng, 1, 3);
    const OutlineMask o = build_outline_mask(mesh, 64, 64, k);
    const BoolGrid cov = oracle::coverage(mesh, 64, 64);
    EXPECT_EQ(o.grid, oracle::outline(cov, k));
    for (std::size_t c = 0; c < cov.cells.size(); ++c) ASSERT_FALSE(cov.cells[c] && o.grid.cells[c]);
  }
}

TEST(Padding, BorderTexelReceivesValue) {
  const TriangleMesh island = make_plane(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), 1,
                                         Vec2(4 / 16.0, 4 / 16.0), Vec2(8 / 16.0, 8 / 16.0));
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(16));
  const OutlineMask outline = build_outline_mask(island, 16, 16, 1);
  EditedAreaMask edited(16, 16);
  edited.add(5 * 16 + 4);  // (4, 5) sits on the island's left border
  EditingTool tool = make_square_tool(0, 0, 1, 9, 1);
  std::vector<std::uint32_t> padded;
  const std::size_t n = apply_padding(layer, outline, edited, tool, &padded);
  const std::vector<std::uint32_t> want{4 * 16 + 3, 5 * 16 + 3, 6 * 16 + 3};
  EXPECT_EQ(n, 3u);
  EXPECT_EQ(padded, want);
  for (std::uint32_t i : want) {
    EXPECT_EQ(layer.data().value(i), 9);
    EXPECT_EQ(layer.mask().value(i), 1);
  }
  EXPECT_EQ(layer.valid_texels(), 3u);
}

TEST(Padding, FarBlobAndZeroRadius) {
  const TriangleMesh island = make_plane(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), 1,
                                         Vec2(4 / 32.0, 4 / 32.0), Vec2(20 / 32.0, 20 / 32.0));
  TexturePool pool;
  InformationLayer layer = create_layer(pool, spec(32));
  const OutlineMask outline = build_outline_mask(island, 32, 32, 1);
  EditedAreaMask edited(32, 32);
  for (int y = 10; y < 13; ++y)
    for (int x = 10; x < 13; ++x) edited.add(static_cast<std::uint32_t>(y * 32 + x));
  EXPECT_EQ(apply_padding(layer, outline, edited, make_square_tool(0, 0, 1, 1, 1)), 0u);
  EditedAreaMask border(32, 32);
  border.add(4 * 32 + 4);
  EXPECT_EQ(apply_padding(layer, outline, border, make_square_tool(0, 0, 1, 1, 0)), 0u);
  EXPECT_EQ(layer.valid_texels(), 0u);
}

TEST(Padding, MatchesOracleOnRandomIslands) {
  gen::Rng rng(27);
  TexturePool pool;
  for (int i = 0; i < 40; ++i) {
    const TriangleMesh mesh = gen::random_islands(rng, gen::uniform_int(rng, 1, 10));
    const BoolGrid cov = oracle::coverage(mesh, 64, 64);
    const int r = gen::uniform_int(rng, 0, 3);
    const OutlineMask outline = build_outline_mask(mesh, 64, 64, std::max(1, r));
    EditedAreaMask edited(64, 64);
    std::vector<std::uint32_t> ed;
    for (std::uint32_t t = 0; t < 64 * 64; ++t)
      if (cov.cells[t] && gen::uniform(rng, 0, 1) < 0.15) {
        edited.add(t);
        ed.push_back(t);
      }
    InformationLayer layer = create_layer(pool, spec(64));
    EditingTool tool = make_square_tool(0, 0, 1, 5, r);
    std::vector<std::uint32_t> padded;
    apply_padding(layer, outline, edited, tool, &padded);
    EXPECT_EQ(padded, oracle::padded(outline.grid, ed, r)) << i;
    EXPECT_EQ(masked(layer), padded);  // no other texel changes
  }
}

TEST(StrokeAndPad, MaskSoundnessAndLocality) {
  gen::Rng rng(90);
  TexturePool pool;
  for (int scene = 0; scene < 6; ++scene) {
    const TriangleMesh mesh = gen::random_scene(rng);
    const Camera cam = gen::random_camera(rng);
    const DepthMap depth = render_depth(mesh, cam);
    InformationLayer layer = create_layer(pool, spec(128));
    const OutlineMask outline = build_outline_mask(mesh, 128, 128, 1);
    const BoolGrid cov = uv_coverage(mesh, 128);
    EditedAreaMask edited;
    std::set<std::uint32_t> written;
    for (int k = 0; k < 6; ++k) {
      const EditingTool tool = gen::random_tool(rng, cam);
      const EditResult r = stroke_and_pad(mesh, cam, depth, tool, layer, outline, edited);
      EXPECT_EQ(edited.texels(), r.edited);
      for (std::uint32_t t : r.edited) ASSERT_TRUE(cov.cells[t]);
      for (std::uint32_t t : r.padded) {
        ASSERT_TRUE(outline.grid.cells[t]);
        ASSERT_FALSE(std::binary_search(r.edited.begin(), r.edited.end(), t));
      }
      std::vector<std::uint32_t> both = r.edited;
      both.insert(both.end(), r.padded.begin(), r.padded.end());
      EXPECT_EQ(r.dirty, texel_bounds(both, 128));
      written.insert(r.edited.begin(), r.edited.end());
      written.insert(r.padded.begin(), r.padded.end());
    }
    EXPECT_EQ(masked(layer), std::vector<std::uint32_t>(written.begin(), written.end()));
  }
}

TEST(EditedAreaMask, ResetClearsPreviousStroke) {
  EditedAreaMask m(8, 8);
  m.add(5);
  m.add(2);
  EXPECT_EQ(m.texels(), (std::vector<std::uint32_t>{2, 5}));
  m.reset(8, 8);
  EXPECT_TRUE(m.texels().empty());
  EXPECT_EQ(m.grid().count(), 0u);
  m.reset(4, 2);
  EXPECT_EQ(m.width(), 4);
}

TEST(TexelBounds, Rect) {
  EXPECT_TRUE(texel_bounds({}, 10).empty());
  EXPECT_EQ(texel_bounds({12, 35, 17}, 10), (TexelRect{2, 1, 6, 3}));
  EXPECT_EQ(grid_of({1}, 2, 1).count(), 1u);
}
