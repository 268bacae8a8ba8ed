#include <gtest/gtest.h>

#include <png.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "texlayer/editing.hpp"
#include "texlayer/error.hpp"
#include "texlayer/octree.hpp"
#include "texlayer/tool.hpp"

using namespace texlayer;

namespace {

Camera viewport(int w, int h) {
  Camera c;
  c.width = w;
  c.height = h;
  return c;
}

EditingTool block_tool(double x, double y, int w, int h) {
  EditingTool t;
  t.x = x;
  t.y = y;
  t.shape = BoolGrid(w, h);
  std::fill(t.shape.cells.begin(), t.shape.cells.end(), 1);
  return t;
}

}  // namespace

TEST(ToolProjection, CenteredTool) {
  const EditProjection p = compute_tool_projection(viewport(800, 600), block_tool(400, 300, 100, 100));
  EXPECT_EQ(p.scale, Vec2(4, 3));
  EXPECT_EQ(p.translate, Vec2(0, 0));
  const EditProjection q =
      compute_tool_projection(viewport(1024, 1024), block_tool(512, 512, 256, 256));
  EXPECT_EQ(q.scale, Vec2(2, 2));
  EXPECT_EQ(q.translate, Vec2(0, 0));
}

TEST(ToolProjection, CornerTool) {
  const EditProjection p = compute_tool_projection(viewport(800, 600), block_tool(0, 0, 100, 100));
  EXPECT_EQ(p.translate, Vec2(-4, -3));
}

TEST(ToolProjection, ProjectorMapsToolBlockOntoUnitSquare) {
  gen::Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const Camera cam = gen::random_camera(rng);
    const int tw = gen::uniform_int(rng, 1, 60);
    const int th = gen::uniform_int(rng, 1, 60);
    const EditingTool tool = block_tool(gen::uniform(rng, 0, cam.width), gen::uniform(rng, 0, cam.height), tw, th);
    const EditProjection p = compute_tool_projection(cam, tool);
    // A world point seen at window (xw, yw) lands at s/w = (xw - (x - tw/2)) / tw.
    const double xw = gen::uniform(rng, 0, cam.width);
    const double yw = gen::uniform(rng, 0, cam.height);
    const Ray ray = camera_ray(cam, xw, yw);
    const Vec3 world = ray.origin + gen::uniform(rng, 0.1, 0.9) * ray.direction;
    const Vec4 st = p.projector * Vec4(world.x(), world.y(), world.z(), 1.0);
    EXPECT_NEAR(st.x() / st.w(), (xw - (tool.x - tw / 2.0)) / tw, 1e-7);
    EXPECT_NEAR(st.y() / st.w(), (yw - (tool.y - th / 2.0)) / th, 1e-7);
    EXPECT_TRUE(p.projector.isApprox(p.tool_matrix * cam.view_projection(), 1e-12));
  }
}

TEST(ToolProjection, UploadIsOneFloatMatrix) {
  const EditProjection p = compute_tool_projection(viewport(64, 64), block_tool(3, 4, 5, 5));
  const auto m = p.upload_matrix();
  EXPECT_EQ(sizeof(m), kTextureStrokeTransferBytes);
  EXPECT_EQ(kTextureStrokeTransferBytes, 64u);
  EXPECT_EQ(m[12], static_cast<float>(p.projector(0, 3)));  // column-major
}

TEST(ToolProjection, DegenerateCamera) {
  Camera cam = viewport(64, 64);
  cam.view = Mat4::Zero();
  try {
    compute_tool_projection(cam, block_tool(1, 1, 3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateCamera);
  }
}

TEST(ProjectFragment, Examples) {
  EXPECT_EQ(project_fragment(0.5, 0.5, 1), Vec2(0.5, 0.5));
  EXPECT_EQ(project_fragment(2, 2, 4), Vec2(0.5, 0.5));
  EXPECT_FALSE(project_fragment(1.5, 0.5, 1));
  EXPECT_FALSE(project_fragment(0.5, 0.5, 0));
  EXPECT_FALSE(project_fragment(-0.5, -0.5, -1));
  EXPECT_EQ(project_fragment(0, 1, 2), Vec2(0, 0.5));
  EXPECT_EQ(project_fragment(3, 0, 3), Vec2(1, 0));
}

TEST(ToolShapes, CircleAndSquare) {
  const BoolGrid c = circle_shape(3);
  EXPECT_EQ(c.width, 7);
  std::size_t brute = 0;
  for (int j = 0; j < 7; ++j)
    for (int i = 0; i < 7; ++i) {
      const bool in = (i - 3) * (i - 3) + (j - 3) * (j - 3) <= 9;
      EXPECT_EQ(c.at(i, j), in);
      brute += in;
    }
  EXPECT_EQ(c.count(), brute);
  EXPECT_EQ(square_shape(2).count(), 25u);
  EXPECT_EQ(circle_shape(0).count(), 1u);
  const EditingTool t = make_circle_tool(10, 10, 4, 2.0, 3);
  EXPECT_EQ(t.kernel_radius, 3);
  EXPECT_EQ(t.value, 2.0);
  EXPECT_EQ(t.shape_width(), 9);
}

TEST(ToolShapes, Validation) {
  EditingTool t;
  EXPECT_THROW(t.validate(), Error);
  t = make_square_tool(0, 0, 1, 1);
  t.kernel_radius = -1;
  EXPECT_THROW(t.validate(), Error);
}

TEST(ToolMasks, PbmAndPgm) {
  // Rows are stored top-down in the file; grid row 0 is the bottom.
  const BoolGrid p1 = load_pgm_mask("P1\n# mask\n3 2\n1 0 0\n0 0 1\n");
  EXPECT_EQ(p1.width, 3);
  EXPECT_EQ(p1.height, 2);
  EXPECT_TRUE(p1.at(0, 1));
  EXPECT_TRUE(p1.at(2, 0));
  EXPECT_EQ(p1.count(), 2u);
  const BoolGrid p2 = load_pgm_mask("P2 2 2 255 0 7 0 0");
  EXPECT_TRUE(p2.at(1, 1));
  EXPECT_EQ(p2.count(), 1u);
  std::string p5 = "P5 2 1 255\n";
  p5 += '\0';
  p5 += '\x80';
  EXPECT_TRUE(load_pgm_mask(p5).at(1, 0));
  std::string p4 = "P4 9 1\n";
  p4 += '\x80';
  p4 += '\x80';
  const BoolGrid bits = load_pgm_mask(p4);
  EXPECT_TRUE(bits.at(0, 0));
  EXPECT_TRUE(bits.at(8, 0));
  EXPECT_EQ(bits.count(), 2u);
  EXPECT_THROW(load_pgm_mask("P7 1 1"), Error);
  EXPECT_THROW(load_pgm_mask("P2 2 2 255 0 7 0"), Error);
}

TEST(ToolMasks, Png) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = 4;
  img.height = 2;
  img.format = PNG_FORMAT_GA;
  // Top row: one lit opaque pixel and one lit transparent pixel.
  const std::uint8_t px[] = {255, 255, 0, 255, 200, 0, 0, 0, 0, 0, 0, 0, 0, 255, 9, 255};
  png_alloc_size_t size = 0;
  ASSERT_TRUE(png_image_write_get_memory_size(img, size, 0, px, 0, nullptr));
  std::string buf(size, '\0');
  ASSERT_TRUE(png_image_write_to_memory(&img, buf.data(), &size, 0, px, 0, nullptr));
  buf.resize(size);
  const BoolGrid g = load_png_mask(buf);
  EXPECT_EQ(g.width, 4);
  EXPECT_EQ(g.height, 2);
  EXPECT_TRUE(g.at(0, 1));
  EXPECT_FALSE(g.at(2, 1));
  EXPECT_TRUE(g.at(3, 0));
  EXPECT_EQ(g.count(), 2u);
}

TEST(ToolPixels, MatchOracle) {
  gen::Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const Camera cam = gen::random_camera(rng);
    EditingTool tool = gen::random_tool(rng, cam);
    if (i % 4 == 0) tool.x = std::floor(tool.x) + 0.5 * gen::uniform_int(rng, 0, 1);
    auto got = texlayer::tool_pixels(cam, tool);
    auto want = oracle::tool_pixels(cam, tool);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want) << i;
  }
}
