#include "texlayer/project.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "texlayer/error.hpp"
#include "texlayer/layer_io.hpp"
#include "texlayer/mesh_io.hpp"

namespace texlayer {

namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;

json matrix_json(const Mat4& m) {
  json a = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a.push_back(m(r, c));
  return a;
}

Mat4 matrix_from(const json& a) {
  if (!a.is_array() || a.size() != 16) fail(ErrorCode::kParseError, "matrix needs 16 numbers");
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = a[static_cast<std::size_t>(r * 4 + c)].get<double>();
  return m;
}

}  // namespace

Project::Project(std::uint64_t texel_budget)
    : texel_budget_(texel_budget), pool_(std::make_unique<TexturePool>(texel_budget)) {}

void Project::swap_state(Project& other) {
  // layers hold pointers into their pool, so both travel together
  std::swap(pool_, other.pool_);
  std::swap(mesh_, other.mesh_);
  std::swap(camera_, other.camera_);
  std::swap(depth_, other.depth_);
  std::swap(generation_, other.generation_);
  std::swap(depth_generation_, other.depth_generation_);
  std::swap(layers_, other.layers_);
  std::swap(next_layer_id_, other.next_layer_id_);
  std::swap(outlines_, other.outlines_);
  std::swap(tables_, other.tables_);
  std::swap(depth_bias_, other.depth_bias_);
}

const TriangleMesh& Project::mesh() const {
  if (!mesh_) fail(ErrorCode::kNotFound, "no model loaded");
  return *mesh_;
}

void Project::load_model(TriangleMesh mesh) {
  if (mesh.triangle_count() == 0) fail(ErrorCode::kEmptyMesh, "model has no triangles");
  mesh_ = std::make_shared<const TriangleMesh>(std::move(mesh));
  outlines_.clear();
  depth_.reset();
  ++generation_;
  if (camera_) ensure_depth();
}

void Project::set_camera(const Camera& camera) {
  camera.validate();
  camera_ = camera;
  ++generation_;
  depth_.reset();
  if (mesh_) ensure_depth();
}

void Project::ensure_depth() {
  if (!mesh_) fail(ErrorCode::kNotFound, "no model loaded");
  if (!camera_) fail(ErrorCode::kNotFound, "no camera set");
  if (depth_ && depth_generation_ == generation_) return;
  depth_ = render_depth(*mesh_, *camera_, raster_);
  depth_generation_ = generation_;
}

ProjectLayer& Project::create_layer(LayerSpec spec) {
  const TableExists exists = [this](std::string_view name) { return tables_.has_table(name); };
  auto entry = std::make_unique<ProjectLayer>(ProjectLayer{
      next_layer_id_, texlayer::create_layer(*pool_, std::move(spec), exists), true, {}});
  ++next_layer_id_;
  layers_.push_back(std::move(entry));
  return *layers_.back();
}

ProjectLayer& Project::layer(std::uint32_t id) {
  for (auto& l : layers_) {
    if (l->id == id) return *l;
  }
  fail(ErrorCode::kNotFound, "no layer with id " + std::to_string(id));
}

const ProjectLayer& Project::layer(std::uint32_t id) const {
  return const_cast<Project*>(this)->layer(id);
}

std::vector<const ProjectLayer*> Project::layers() const {
  std::vector<const ProjectLayer*> out;
  for (const auto& l : layers_) out.push_back(l.get());
  return out;
}

void Project::set_visibility(std::uint32_t id, bool visible) { layer(id).visible = visible; }

const OutlineMask& Project::outline_for(int width, int height) {
  const auto key = std::make_pair(width, height);
  auto it = outlines_.find(key);
  if (it == outlines_.end()) {
    it = outlines_.emplace(key, build_outline_mask(mesh(), width, height, 1, raster_)).first;
  }
  return it->second;
}

StrokeOptions Project::stroke_options() const {
  StrokeOptions o;
  o.depth_bias = depth_bias_;
  o.raster = raster_;
  return o;
}

void Project::set_depth_bias(double bias) {
  if (!(bias >= 0.0) || !std::isfinite(bias)) {
    fail(ErrorCode::kInvalidArgument, "depth bias must be finite and >= 0");
  }
  depth_bias_ = bias;
}

EditResult Project::stroke(std::uint32_t layer_id, const EditingTool& tool) {
  ProjectLayer& entry = layer(layer_id);
  ensure_depth();
  if (depth_generation_ != generation_) {
    fail(ErrorCode::kStaleDepth, "depth map is behind the camera generation");
  }
  const OutlineMask& outline = outline_for(entry.layer.width(), entry.layer.height());
  return stroke_and_pad(*mesh_, *camera_, *depth_, tool, entry.layer, outline, entry.edited,
                        stroke_options());
}

void Project::save(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "layers", ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + (dir / "layers").string());

  json manifest;
  manifest["version"] = kManifestVersion;
  manifest["next_layer_id"] = next_layer_id_;
  manifest["depth_bias"] = depth_bias_;
  if (mesh_) {
    save_mesh_ply_file(*mesh_, dir / "mesh.ply");
    manifest["mesh"] = {{"file", "mesh.ply"},
                        {"units", std::string(length_unit_name(mesh_->units()))}};
  }
  if (camera_) {
    manifest["camera"] = {{"view", matrix_json(camera_->view)},
                          {"projection", matrix_json(camera_->projection)},
                          {"width", camera_->width},
                          {"height", camera_->height}};
  }
  json layers = json::array();
  for (const auto& l : layers_) {
    const std::string file = "layers/" + std::to_string(l->id) + ".l3di";
    save_layer_file(l->layer, dir / file);
    layers.push_back({{"id", l->id}, {"file", file}, {"visible", l->visible}});
  }
  manifest["layers"] = layers;
  tables_.save_to(dir / "tables.sqlite");
  manifest["tables"] = "tables.sqlite";

  std::ofstream out(dir / "manifest.json");
  if (!out) fail(ErrorCode::kIoError, "cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

void Project::load(const std::filesystem::path& dir) {
  Project next(texel_budget_);
  next.raster_ = raster_;
  next.generation_ = generation_;
  next.load_into(dir);
  swap_state(next);
}

void Project::load_into(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) fail(ErrorCode::kIoError, "no manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  try {
    if (manifest.at("version").get<int>() != kManifestVersion) {
      fail(ErrorCode::kUnsupportedVersion, "unsupported project manifest version");
    }
    if (manifest.contains("tables")) {
      tables_ = TableStore::load_from(dir / manifest.at("tables").get<std::string>());
    }
    if (manifest.contains("mesh")) {
      const auto& m = manifest.at("mesh");
      const auto units = parse_length_unit(m.at("units").get<std::string>());
      if (!units) fail(ErrorCode::kParseError, "manifest names an unknown length unit");
      mesh_ = std::make_shared<const TriangleMesh>(
          load_mesh_file(dir / m.at("file").get<std::string>(), *units));
    }
    if (manifest.contains("camera")) {
      const auto& c = manifest.at("camera");
      Camera cam;
      cam.view = matrix_from(c.at("view"));
      cam.projection = matrix_from(c.at("projection"));
      cam.width = c.at("width").get<int>();
      cam.height = c.at("height").get<int>();
      cam.validate();
      camera_ = cam;
    }
    depth_bias_ = manifest.value("depth_bias", 1e-4);
    for (const auto& l : manifest.at("layers")) {
      auto entry = std::make_unique<ProjectLayer>(ProjectLayer{
          l.at("id").get<std::uint32_t>(),
          load_layer_file(dir / l.at("file").get<std::string>(), *pool_),
          l.value("visible", true), {}});
      if (entry->layer.kind() == LayerKind::kDatabase &&
          !tables_.has_table(entry->layer.table())) {
        fail(ErrorCode::kUnknownTable, "layer references missing table '" +
                                           entry->layer.table() + "'");
      }
      layers_.push_back(std::move(entry));
    }
    next_layer_id_ = manifest.at("next_layer_id").get<std::uint32_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  ++generation_;
  if (mesh_ && camera_) ensure_depth();
}

}  // namespace texlayer
