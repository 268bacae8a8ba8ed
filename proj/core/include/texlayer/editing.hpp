#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "texlayer/camera.hpp"
#include "texlayer/depth.hpp"
#include "texlayer/grid.hpp"
#include "texlayer/layer.hpp"
#include "texlayer/mesh.hpp"
#include "texlayer/raster.hpp"
#include "texlayer/tool.hpp"

namespace texlayer {

/// Bytes sent to the GPU per texture-path stroke: one 4x4 float32 matrix.
inline constexpr std::uint64_t kTextureStrokeTransferBytes = 16 * sizeof(float);

/// The brush as a projector sharing the camera's view. tool_matrix maps
/// clip coordinates (x, y, z, w) to homogeneous tool coordinates
/// (s, t, z, w) with
///   s = S_f.x * x + (0.5 - T_f.x) * w
///   t = S_f.y * y + (0.5 - T_f.y) * w
/// so that s / w = S_f.x * x_ndc - T_f.x + 0.5 spans [0, 1] across the
/// tool's pixel block.
struct EditProjection {
  Vec2 scale{1.0, 1.0};        // S_f
  Vec2 translate{0.0, 0.0};    // T_f
  Mat4 view_projection = Mat4::Identity();
  Mat4 tool_matrix = Mat4::Identity();
  Mat4 projector = Mat4::Identity();  // tool_matrix * view_projection

  /// The projector as uploaded, column-major float32.
  std::array<float, 16> upload_matrix() const;
};

/// S_f = (W_w / (2 T_w), W_h / (2 T_h)),
/// T_f = ((T_px - W_w / 2) / T_w, (T_py - W_h / 2) / T_h).
/// Throws DegenerateCamera for invalid cameras.
EditProjection compute_tool_projection(const Camera& camera, const EditingTool& tool);

/// (s / w, t / w) when w > 0 and both lie in [0, 1].
std::optional<Vec2> project_fragment(double s, double t, double w);

/// Texels written by the most recent stroke.
class EditedAreaMask {
 public:
  EditedAreaMask() = default;
  EditedAreaMask(int width, int height) : grid_(width, height) {}

  /// Clears the texels of the previous stroke (and resizes when needed).
  void reset(int width, int height);
  void add(std::uint32_t index);

  const BoolGrid& grid() const { return grid_; }
  bool at(int x, int y) const { return grid_.at(x, y); }
  /// Sorted texel indices (y * width + x).
  const std::vector<std::uint32_t>& texels() const { return texels_; }
  int width() const { return grid_.width; }
  int height() const { return grid_.height; }

 private:
  friend struct EditingAccess;
  BoolGrid grid_;
  std::vector<std::uint32_t> texels_;
};

/// Uncovered texels within Chebyshev distance thickness of a covered texel.
struct OutlineMask {
  BoolGrid grid;
  int thickness = 1;
};

struct StrokeOptions {
  double depth_bias = 1e-4;  // normalized depth
  RasterConfig raster;
};

struct EditResult {
  std::vector<std::uint32_t> edited;  // sorted texel indices
  std::vector<std::uint32_t> padded;  // sorted, disjoint from edited
  double duration_ms = 0.0;
  std::uint64_t transfer_bytes = kTextureStrokeTransferBytes;
  /// Covered texels offered to the fragment filters; independent of the
  /// tool radius.
  std::uint64_t fragments_visited = 0;
  /// Bounding rectangle of edited and padded texels.
  TexelRect dirty;
};

/// The stroke pipeline: rasterizes the mesh at its texture coordinates
/// into the layer grid and keeps fragments that pass the depth test
/// (bias options.depth_bias), the projector frustum and the tool shape.
/// Kept texels get data = tool.value, mask = true and enter edited.
/// Throws StaleDepth when depth was rendered for another mesh or camera,
/// LayerMeshMismatch when the mesh covers no texel of the layer.
EditResult apply_stroke(const TriangleMesh& mesh, const Camera& camera, const DepthMap& depth,
                        const EditingTool& tool, InformationLayer& layer, EditedAreaMask& edited,
                        const StrokeOptions& options = {});
EditResult apply_stroke(const TriangleMesh& mesh, const Camera& camera, const DepthMap& depth,
                        const EditingTool& tool, InformationLayer& layer,
                        const StrokeOptions& options = {});

OutlineMask build_outline_mask(const TriangleMesh& mesh, int width, int height, int thickness = 1,
                               const RasterConfig& config = {});
/// Outline of an arbitrary coverage grid.
OutlineMask outline_from_coverage(const BoolGrid& coverage, int thickness = 1);

/// Writes tool.value into outline texels within Chebyshev distance
/// tool.kernel_radius of an edited texel. Returns the number of padded
/// texels; their sorted indices go to padded_out when given.
std::size_t apply_padding(InformationLayer& layer, const OutlineMask& outline,
                          const EditedAreaMask& edited, const EditingTool& tool,
                          std::vector<std::uint32_t>* padded_out = nullptr);

/// apply_stroke followed by apply_padding; fills padded and dirty.
EditResult stroke_and_pad(const TriangleMesh& mesh, const Camera& camera, const DepthMap& depth,
                          const EditingTool& tool, InformationLayer& layer,
                          const OutlineMask& outline, EditedAreaMask& edited,
                          const StrokeOptions& options = {});

/// Bounding rectangle of texel indices on a grid of the given width.
TexelRect texel_bounds(const std::vector<std::uint32_t>& indices, int width);

}  // namespace texlayer
