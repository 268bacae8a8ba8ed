#include "texlayer/editing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include "texlayer/error.hpp"

namespace texlayer {

std::array<float, 16> EditProjection::upload_matrix() const {
  std::array<float, 16> m{};
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) m[static_cast<std::size_t>(c * 4 + r)] = static_cast<float>(projector(r, c));
  return m;
}

EditProjection compute_tool_projection(const Camera& camera, const EditingTool& tool) {
  camera.validate();
  const double ww = camera.width;
  const double wh = camera.height;
  const double tw = tool.shape_width();
  const double th = tool.shape_height();
  if (tw < 1 || th < 1) fail(ErrorCode::kInvalidArgument, "tool shape is empty");

  EditProjection p;
  p.scale = Vec2(ww / (2.0 * tw), wh / (2.0 * th));
  p.translate = Vec2((tool.x - 0.5 * ww) / tw, (tool.y - 0.5 * wh) / th);
  p.view_projection = camera.view_projection();
  p.tool_matrix = Mat4::Identity();
  p.tool_matrix(0, 0) = p.scale.x();
  p.tool_matrix(0, 3) = 0.5 - p.translate.x();
  p.tool_matrix(1, 1) = p.scale.y();
  p.tool_matrix(1, 3) = 0.5 - p.translate.y();
  p.projector = p.tool_matrix * p.view_projection;
  return p;
}

std::optional<Vec2> project_fragment(double s, double t, double w) {
  if (!(w > 0.0)) return std::nullopt;
  const double u = s / w;
  const double v = t / w;
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) return std::nullopt;
  return Vec2(u, v);
}

void EditedAreaMask::reset(int width, int height) {
  if (grid_.width != width || grid_.height != height) {
    grid_ = BoolGrid(width, height);
  } else {
    for (std::uint32_t i : texels_) grid_.cells[i] = 0;
  }
  texels_.clear();
}

void EditedAreaMask::add(std::uint32_t index) {
  if (grid_.cells[index] != 0) return;
  grid_.cells[index] = 1;
  texels_.insert(std::upper_bound(texels_.begin(), texels_.end(), index), index);
}

struct EditingAccess {
  static BoolGrid& grid(EditedAreaMask& m) { return m.grid_; }
  static std::vector<std::uint32_t>& texels(EditedAreaMask& m) { return m.texels_; }
};

TexelRect texel_bounds(const std::vector<std::uint32_t>& indices, int width) {
  if (indices.empty() || width <= 0) return {};
  int x0 = width, x1 = -1;
  const int y0 = static_cast<int>(*std::min_element(indices.begin(), indices.end()) / width);
  const int y1 = static_cast<int>(*std::max_element(indices.begin(), indices.end()) / width);
  for (std::uint32_t i : indices) {
    const int x = static_cast<int>(i % static_cast<std::uint32_t>(width));
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
  }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

namespace {

struct StrokeVertex {
  Vec2 texel;
  // clip x, y, z, w followed by tool s, t
  std::array<double, 6> attr;
};

}  // namespace

EditResult apply_stroke(const TriangleMesh& mesh, const Camera& camera, const DepthMap& depth,
                        const EditingTool& tool, InformationLayer& layer, EditedAreaMask& edited,
                        const StrokeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  tool.validate();
  const EditProjection proj = compute_tool_projection(camera, tool);
  if (!depth.matches(mesh, camera) || depth.width != camera.width ||
      depth.height != camera.height) {
    fail(ErrorCode::kStaleDepth, "depth map was rendered for another camera or mesh");
  }
  const double value = checked_layer_value(layer, tool.value);

  const int width = layer.width();
  const int height = layer.height();
  edited.reset(width, height);

  const auto positions = mesh.positions();
  const auto uvs = mesh.uvs();
  std::vector<StrokeVertex> verts(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec4 p(positions[i].x(), positions[i].y(), positions[i].z(), 1.0);
    const Vec4 clip = proj.view_projection * p;
    const Vec4 tool_h = proj.projector * p;
    verts[i].texel = uv_to_texel(uvs[i], width, height);
    verts[i].attr = {clip.x(), clip.y(), clip.z(), clip.w(), tool_h.x(), tool_h.y()};
  }

  const double ww = camera.width;
  const double wh = camera.height;
  const int tw = tool.shape_width();
  const int th = tool.shape_height();
  const double bias = options.depth_bias;
  TexturePlane& data = layer.data();
  auto mask = layer.mask().as<std::uint8_t>();
  BoolGrid& edited_grid = EditingAccess::grid(edited);

  std::mutex merge;
  std::vector<std::uint32_t> written;
  std::uint64_t visited_total = 0;

  for_each_row_band(height, options.raster, [&](int row_begin, int row_end) {
    std::vector<std::uint32_t> local;
    std::uint64_t visited = 0;
    for (const Triangle& tri : mesh.triangles()) {
      const StrokeVertex& a = verts[tri[0]];
      const StrokeVertex& b = verts[tri[1]];
      const StrokeVertex& c = verts[tri[2]];
      scan_triangle(a.texel, b.texel, c.texel, width, row_begin, row_end,
                    [&](int x, int y, double b0, double b1, double b2) {
                      ++visited;
                      std::array<double, 6> f;
                      for (std::size_t k = 0; k < 6; ++k) {
                        f[k] = b0 * a.attr[k] + b1 * b.attr[k] + b2 * c.attr[k];
                      }
                      const double w = f[3];
                      if (!(w > 0.0)) return;
                      // depth test against the camera's depth map
                      const double xw = (f[0] / w + 1.0) * 0.5 * ww;
                      const double yw = (f[1] / w + 1.0) * 0.5 * wh;
                      const double zn = f[2] / w;
                      if (!(xw >= 0.0 && xw < ww && yw >= 0.0 && yw < wh)) return;
                      if (!(zn >= -1.0 && zn <= 1.0)) return;
                      const double frag_depth = (zn + 1.0) * 0.5;
                      const int px = static_cast<int>(xw);
                      const int py = static_cast<int>(yw);
                      if (frag_depth > static_cast<double>(depth.at(px, py)) + bias) return;
                      // projector frustum
                      const auto st = project_fragment(f[4], f[5], w);
                      if (!st) return;
                      // tool shape
                      const int i = std::min(static_cast<int>(st->x() * tw), tw - 1);
                      const int j = std::min(static_cast<int>(st->y() * th), th - 1);
                      if (!tool.shape.at(i, j)) return;
                      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
                      data.set_value(idx, value);
                      mask[idx] = 1;
                      if (edited_grid.cells[idx] == 0) {
                        edited_grid.cells[idx] = 1;
                        local.push_back(static_cast<std::uint32_t>(idx));
                      }
                    });
    }
    std::lock_guard lock(merge);
    written.insert(written.end(), local.begin(), local.end());
    visited_total += visited;
  });

  if (visited_total == 0) {
    fail(ErrorCode::kLayerMeshMismatch, "mesh covers no texel of the layer");
  }
  std::sort(written.begin(), written.end());
  EditingAccess::texels(edited) = written;

  EditResult result;
  result.edited = std::move(written);
  result.fragments_visited = visited_total;
  result.dirty = texel_bounds(result.edited, width);
  result.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

EditResult apply_stroke(const TriangleMesh& mesh, const Camera& camera, const DepthMap& depth,
                        const EditingTool& tool, InformationLayer& layer,
                        const StrokeOptions& options) {
  EditedAreaMask edited(layer.width(), layer.height());
  return apply_stroke(mesh, camera, depth, tool, layer, edited, options);
}

OutlineMask outline_from_coverage(const BoolGrid& coverage, int thickness) {
  if (thickness < 1) fail(ErrorCode::kInvalidArgument, "outline thickness must be >= 1");
  const int w = coverage.width;
  const int h = coverage.height;
  OutlineMask out{BoolGrid(w, h), thickness};
  // Separable box dilation: Chebyshev distance <= k is a (2k+1)^2 box.
  BoolGrid rows(w, h);
  for (int y = 0; y < h; ++y) {
    int last = -1'000'000'000;  // most recent covered x
    for (int x = 0; x < w; ++x) {
      if (coverage.at(x, y)) last = x;
      if (x - last <= thickness) rows.set(x, y);
    }
    last = 1'000'000'000;
    for (int x = w - 1; x >= 0; --x) {
      if (coverage.at(x, y)) last = x;
      if (last - x <= thickness) rows.set(x, y);
    }
  }
  for (int x = 0; x < w; ++x) {
    int last = -1'000'000'000;
    for (int y = 0; y < h; ++y) {
      if (rows.at(x, y)) last = y;
      if (y - last <= thickness && !coverage.at(x, y)) out.grid.set(x, y);
    }
    last = 1'000'000'000;
    for (int y = h - 1; y >= 0; --y) {
      if (rows.at(x, y)) last = y;
      if (last - y <= thickness && !coverage.at(x, y)) out.grid.set(x, y);
    }
  }
  return out;
}

OutlineMask build_outline_mask(const TriangleMesh& mesh, int width, int height, int thickness,
                               const RasterConfig& config) {
  if (width < 1 || height < 1) fail(ErrorCode::kInvalidArgument, "resolution must be >= 1");
  return outline_from_coverage(uv_coverage(mesh, width, height, config), thickness);
}

std::size_t apply_padding(InformationLayer& layer, const OutlineMask& outline,
                          const EditedAreaMask& edited, const EditingTool& tool,
                          std::vector<std::uint32_t>* padded_out) {
  const int w = layer.width();
  const int h = layer.height();
  if (outline.grid.width != w || outline.grid.height != h || edited.width() != w ||
      edited.height() != h) {
    fail(ErrorCode::kTargetMismatch, "padding grids differ from the layer resolution");
  }
  if (padded_out != nullptr) padded_out->clear();
  const int r = tool.kernel_radius;
  if (r <= 0 || edited.texels().empty()) return 0;
  const double value = checked_layer_value(layer, tool.value);

  std::vector<std::uint32_t> padded;
  for (std::uint32_t e : edited.texels()) {
    const int ex = static_cast<int>(e % static_cast<std::uint32_t>(w));
    const int ey = static_cast<int>(e / static_cast<std::uint32_t>(w));
    for (int y = std::max(0, ey - r); y <= std::min(h - 1, ey + r); ++y) {
      for (int x = std::max(0, ex - r); x <= std::min(w - 1, ex + r); ++x) {
        if (outline.grid.at(x, y)) padded.push_back(static_cast<std::uint32_t>(outline.grid.index(x, y)));
      }
    }
  }
  std::sort(padded.begin(), padded.end());
  padded.erase(std::unique(padded.begin(), padded.end()), padded.end());
  TexturePlane& data = layer.data();
  auto mask = layer.mask().as<std::uint8_t>();
  for (std::uint32_t i : padded) {
    data.set_value(i, value);
    mask[i] = 1;
  }
  const std::size_t n = padded.size();
  if (padded_out != nullptr) *padded_out = std::move(padded);
  return n;
}

EditResult stroke_and_pad(const TriangleMesh& mesh, const Camera& camera, const DepthMap& depth,
                          const EditingTool& tool, InformationLayer& layer,
                          const OutlineMask& outline, EditedAreaMask& edited,
                          const StrokeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  EditResult result = apply_stroke(mesh, camera, depth, tool, layer, edited, options);
  apply_padding(layer, outline, edited, tool, &result.padded);
  result.dirty = rect_union(result.dirty, texel_bounds(result.padded, layer.width()));
  result.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace texlayer
