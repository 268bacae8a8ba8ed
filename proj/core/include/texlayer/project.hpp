#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "texlayer/camera.hpp"
#include "texlayer/database.hpp"
#include "texlayer/depth.hpp"
#include "texlayer/editing.hpp"
#include "texlayer/layer.hpp"
#include "texlayer/mesh.hpp"

namespace texlayer {

struct ProjectLayer {
  std::uint32_t id = 0;
  InformationLayer layer;
  bool visible = true;
  EditedAreaMask edited;
};

/// Engine state behind one editing session: the mesh, its layers and
/// tables, the camera with its depth map, and cached outline masks.
///
/// On disk a project is a directory holding manifest.json, mesh.ply,
/// layers/<id>.l3di and tables.sqlite.
class Project {
 public:
  explicit Project(std::uint64_t texel_budget = TexturePool::default_texel_budget());
  Project(const Project&) = delete;
  Project& operator=(const Project&) = delete;

  void load_model(TriangleMesh mesh);
  bool has_model() const { return mesh_ != nullptr; }
  /// Throws NotFound when no model is loaded.
  const TriangleMesh& mesh() const;

  /// Validates the camera, renders its depth map and bumps the generation.
  void set_camera(const Camera& camera);
  const std::optional<Camera>& camera() const { return camera_; }
  /// Increments on every model or camera change.
  std::uint64_t generation() const { return generation_; }
  const DepthMap* depth_map() const { return depth_ ? &*depth_ : nullptr; }

  ProjectLayer& create_layer(LayerSpec spec);
  ProjectLayer& layer(std::uint32_t id);
  const ProjectLayer& layer(std::uint32_t id) const;
  /// Layers in creation order.
  std::vector<const ProjectLayer*> layers() const;
  void set_visibility(std::uint32_t id, bool visible);

  /// apply_stroke + apply_padding on one layer with the current camera.
  /// Re-renders the depth map first when it is behind the generation.
  EditResult stroke(std::uint32_t layer_id, const EditingTool& tool);

  TableStore& tables() { return tables_; }
  const TableStore& tables() const { return tables_; }

  RasterConfig& raster() { return raster_; }
  StrokeOptions stroke_options() const;
  double depth_bias() const { return depth_bias_; }
  void set_depth_bias(double bias);

  void save(const std::filesystem::path& dir) const;
  /// Replaces the whole state with the project stored in dir.
  void load(const std::filesystem::path& dir);

  /// Generation the current depth map was rendered at.
  std::uint64_t depth_generation() const { return depth_generation_; }

 private:
  const OutlineMask& outline_for(int width, int height);
  void ensure_depth();
  void load_into(const std::filesystem::path& dir);
  void swap_state(Project& other);

  std::uint64_t texel_budget_;
  std::unique_ptr<TexturePool> pool_;
  std::shared_ptr<const TriangleMesh> mesh_;
  std::optional<Camera> camera_;
  std::optional<DepthMap> depth_;
  std::uint64_t generation_ = 0;
  std::uint64_t depth_generation_ = 0;
  std::vector<std::unique_ptr<ProjectLayer>> layers_;
  std::uint32_t next_layer_id_ = 1;
  std::map<std::pair<int, int>, OutlineMask> outlines_;
  TableStore tables_;
  RasterConfig raster_;
  double depth_bias_ = 1e-4;
};

}  // namespace texlayer
