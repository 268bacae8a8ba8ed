#include "texlayer/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <nlohmann/json.hpp>

#include "texlayer/depth.hpp"
#include "texlayer/editing.hpp"
#include "texlayer/error.hpp"
#include "texlayer/layer.hpp"
#include "texlayer/mesh_io.hpp"
#include "texlayer/octree.hpp"
#include "texlayer/procedural.hpp"

namespace texlayer {

std::string_view bench_engine_name(BenchEngine engine) {
  return engine == BenchEngine::kTexture ? "texture" : "octree";
}

void BenchPlan::validate() const {
  if (repetitions < 3) fail(ErrorCode::kInvalidArgument, "repetitions must be >= 3");
  if (!std::is_sorted(radii.begin(), radii.end())) {
    fail(ErrorCode::kInvalidArgument, "radii must be sorted ascending");
  }
  for (int r : radii) {
    if (r < 0) fail(ErrorCode::kInvalidArgument, "radii must be >= 0");
  }
  if (resolutions.size() != depths.size()) {
    fail(ErrorCode::kInvalidArgument, "resolutions and depths are matched pairwise");
  }
  for (int res : resolutions) {
    if (res < 1) fail(ErrorCode::kInvalidArgument, "resolutions must be >= 1");
  }
  for (int d : depths) {
    if (d < 0 || d > kMaxOctreeDepth) fail(ErrorCode::kInvalidArgument, "depths must be in [0, 16]");
  }
  for (const BenchMesh& m : meshes) {
    if (m.name.empty()) fail(ErrorCode::kInvalidArgument, "bench meshes need a name");
  }
}

namespace {

using nlohmann::json;

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::kParseError, "expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

BenchPlan parse_bench_plan(std::string_view text) {
  BenchPlan plan;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) fail(ErrorCode::kParseError, "bench plan must be a JSON object");
    for (const auto& m : doc.value("meshes", json::array())) {
      BenchMesh mesh;
      if (m.is_string()) {
        mesh.name = mesh.source = m.get<std::string>();
      } else {
        read_opt(m, "source", mesh.source);
        mesh.name = m.value("name", mesh.source);
        read_opt(m, "path", mesh.path);
        if (m.contains("units")) {
          const auto u = parse_length_unit(m.at("units").get<std::string>());
          if (!u) fail(ErrorCode::kParseError, "unknown length unit");
          mesh.units = *u;
        }
      }
      plan.meshes.push_back(std::move(mesh));
    }
    if (doc.contains("engines")) {
      plan.engines.clear();
      for (const auto& e : doc.at("engines")) {
        const auto name = e.get<std::string>();
        if (name == "texture") {
          plan.engines.push_back(BenchEngine::kTexture);
        } else if (name == "octree") {
          plan.engines.push_back(BenchEngine::kOctree);
        } else {
          fail(ErrorCode::kParseError, "unknown engine '" + name + "'");
        }
      }
    }
    read_opt(doc, "resolutions", plan.resolutions);
    read_opt(doc, "depths", plan.depths);
    read_opt(doc, "radii", plan.radii);
    read_opt(doc, "repetitions", plan.repetitions);
    read_opt(doc, "octree_memory_budget", plan.octree_memory_budget);
    if (doc.contains("stroke")) {
      const auto& s = doc.at("stroke");
      plan.stroke = Vec2(s.at(0).get<double>(), s.at(1).get<double>());
    }
    if (doc.contains("camera")) {
      const auto& c = doc.at("camera");
      BenchCamera& cam = plan.camera;
      read_opt(c, "mode", cam.mode);
      if (c.contains("eye")) cam.eye = vec3_from(c.at("eye"));
      if (c.contains("target")) cam.target = vec3_from(c.at("target"));
      if (c.contains("up")) cam.up = vec3_from(c.at("up"));
      read_opt(c, "fovy", cam.fovy);
      read_opt(c, "near", cam.near_plane);
      read_opt(c, "far", cam.far_plane);
      read_opt(c, "width", cam.width);
      read_opt(c, "height", cam.height);
      read_opt(c, "zoom", cam.zoom);
      if (cam.mode != "auto" && cam.mode != "look-at") {
        fail(ErrorCode::kParseError, "camera mode must be auto or look-at");
      }
    }
    if (doc.contains("raster")) {
      const auto& r = doc.at("raster");
      const std::string backend = r.value("backend", std::string("reference"));
      if (backend == "reference") {
        plan.raster.backend = RasterBackend::kReference;
      } else if (backend == "parallel") {
        plan.raster.backend = RasterBackend::kParallel;
      } else {
        fail(ErrorCode::kParseError, "unknown raster backend '" + backend + "'");
      }
      plan.raster.threads = r.value("threads", 0u);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("bench plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

TriangleMesh load_bench_mesh(const BenchMesh& m) {
  if (m.source == "terrain") return make_terrain().with_units(m.units);
  if (m.source == "sphere") {
    return make_uv_sphere({.stacks = 64, .slices = 128, .radius = 1.0, .bump = 0.05, .seed = 11})
        .with_units(m.units);
  }
  if (m.source == "scan") {
    // 2 * 1000 * 500 = 1M triangles
    return make_uv_sphere({.stacks = 501, .slices = 1000, .radius = 1.0, .bump = 0.03, .seed = 5})
        .with_units(m.units);
  }
  if (m.source == "flat-square") return make_flat_square(1.0, 0.0, 1, m.units);
  if (m.source == "cube") return make_unit_cube().with_units(m.units);
  if (m.source == "file") return load_mesh_file(m.path, m.units);
  fail(ErrorCode::kInvalidArgument, "unknown mesh source '" + m.source + "'");
}

Camera bench_camera(const BenchCamera& c, const TriangleMesh& mesh) {
  if (c.mode == "look-at") {
    return Camera::look_at_perspective(c.eye, c.target, c.up, c.fovy, c.near_plane, c.far_plane,
                                       c.width, c.height);
  }
  const Box3& b = mesh.bounds();
  const Vec3 ext = b.extent();
  const double shorter = std::max(std::min(ext.x(), ext.y()), 1e-9) * c.zoom;
  const double aspect = static_cast<double>(c.width) / c.height;
  const double half_v = aspect >= 1.0 ? 0.5 * shorter : 0.5 * shorter / aspect;
  const double dist = half_v / std::tan(0.5 * c.fovy * std::numbers::pi / 180.0);
  const Vec3 target = b.center();
  const Vec3 eye = Vec3(target.x(), target.y(), b.max.z() + dist);
  const double reach = dist + ext.z() + ext.norm();
  return Camera::look_at_perspective(eye, target, Vec3(0, 1, 0), c.fovy, 0.1 * dist, 2.0 * reach,
                                     c.width, c.height);
}

std::uint64_t stroke_input_hash(const Camera& camera, double x, double y, int radius) {
  std::uint64_t h = camera.fingerprint();
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix(&x, sizeof x);
  mix(&y, sizeof y);
  mix(&radius, sizeof radius);
  return h;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

LayerSpec float_layer_spec(const char* name, int resolution) {
  LayerSpec spec;
  spec.name = name;
  spec.element = ElementKind::kFloat32;
  spec.width = resolution;
  spec.height = resolution;
  return spec;
}

Vec2 stroke_position(const BenchPlan& plan, const Camera& camera) {
  if (plan.stroke) return *plan.stroke;
  return Vec2(std::floor(camera.width / 2.0) + 0.5, std::floor(camera.height / 2.0) + 0.5);
}

BenchRecord missing_record(const std::string& mesh, BenchEngine engine, int level, int radius,
                           std::uint64_t hash, const Error& e, std::optional<double> build_ms) {
  BenchRecord r;
  r.mesh = mesh;
  r.engine = engine;
  r.level = level;
  r.radius = radius;
  r.input_hash = hash;
  r.build_ms = build_ms;
  r.note = std::string(error_code_name(e.code()));
  return r;
}

void sweep_texture(const BenchPlan& plan, const BenchMesh& bm, const TriangleMesh& mesh,
                   const Camera& camera, const DepthMap& depth, std::vector<BenchRecord>& out) {
  const Vec2 at = stroke_position(plan, camera);
  for (int res : plan.resolutions) {
    const auto setup = std::chrono::steady_clock::now();
    std::optional<TexturePool> pool;
    std::optional<InformationLayer> layer;
    OutlineMask outline;
    try {
      pool.emplace(std::max<std::uint64_t>(TexturePool::default_texel_budget(),
                                           2ull * static_cast<std::uint64_t>(res) * res));
      layer.emplace(create_layer(*pool, float_layer_spec("bench", res)));
      outline = build_outline_mask(mesh, res, res, 1, plan.raster);
    } catch (const Error& e) {
      for (int r : plan.radii) {
        out.push_back(missing_record(bm.name, BenchEngine::kTexture, res, r,
                                     stroke_input_hash(camera, at.x(), at.y(), r), e, std::nullopt));
      }
      continue;
    }
    const double build_ms = elapsed_ms(setup);
    const std::uint64_t peak = layer->data().bytes().size() + layer->mask().bytes().size() +
                               outline.grid.cells.size();
    EditedAreaMask edited(res, res);
    StrokeOptions options;
    options.raster = plan.raster;
    for (int radius : plan.radii) {
      const EditingTool tool = make_circle_tool(at.x(), at.y(), radius, 1.0);
      const std::uint64_t hash = stroke_input_hash(camera, at.x(), at.y(), radius);
      stroke_and_pad(mesh, camera, depth, tool, *layer, outline, edited, options);  // warm-up
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        const EditResult result =
            stroke_and_pad(mesh, camera, depth, tool, *layer, outline, edited, options);
        BenchRecord rec;
        rec.time_ms = elapsed_ms(start);
        rec.mesh = bm.name;
        rec.engine = BenchEngine::kTexture;
        rec.level = res;
        rec.radius = radius;
        rec.rep = rep;
        rec.cells = result.edited.size();
        rec.transfer_bytes = result.transfer_bytes;
        rec.build_ms = build_ms;
        rec.peak_bytes = peak;
        rec.input_hash = hash;
        out.push_back(std::move(rec));
      }
    }
  }
}

void sweep_octree(const BenchPlan& plan, const BenchMesh& bm, const TriangleMesh& mesh,
                  const Camera& camera, std::vector<BenchRecord>& out) {
  const Vec2 at = stroke_position(plan, camera);
  for (int depth : plan.depths) {
    std::optional<SurfaceOctree> octree;
    const auto setup = std::chrono::steady_clock::now();
    try {
      octree.emplace(build_octree(mesh, depth, {.root = std::nullopt,
                                                .memory_budget = plan.octree_memory_budget}));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMemoryBudgetExceeded) throw;
      const double ms = elapsed_ms(setup);
      for (int r : plan.radii) {
        out.push_back(missing_record(bm.name, BenchEngine::kOctree, depth, r,
                                     stroke_input_hash(camera, at.x(), at.y(), r), e, ms));
      }
      continue;
    }
    OctreeLayer layer(*octree, ElementKind::kFloat32);
    for (int radius : plan.radii) {
      const EditingTool tool = make_circle_tool(at.x(), at.y(), radius, 1.0);
      const std::uint64_t hash = stroke_input_hash(camera, at.x(), at.y(), radius);
      octree_edit(*octree, layer, mesh, camera, tool, 1.0);  // warm-up
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        const OctreeEditResult result = octree_edit(*octree, layer, mesh, camera, tool, 1.0);
        BenchRecord rec;
        rec.time_ms = elapsed_ms(start);
        rec.mesh = bm.name;
        rec.engine = BenchEngine::kOctree;
        rec.level = depth;
        rec.radius = radius;
        rec.rep = rep;
        rec.cells = result.edited.size();
        rec.transfer_bytes = result.transfer_bytes;
        rec.build_ms = octree->stats().build_ms;
        rec.peak_bytes = octree->stats().peak_bytes;
        rec.input_hash = hash;
        out.push_back(std::move(rec));
      }
    }
  }
}

}  // namespace

std::vector<BenchRecord> run_radius_sweep(const BenchPlan& plan) {
  plan.validate();
  std::vector<BenchRecord> out;
  for (const BenchMesh& bm : plan.meshes) {
    const TriangleMesh mesh = load_bench_mesh(bm);
    const Camera camera = bench_camera(plan.camera, mesh);
    for (BenchEngine engine : plan.engines) {
      if (engine == BenchEngine::kTexture) {
        const DepthMap depth = render_depth(mesh, camera, plan.raster);
        sweep_texture(plan, bm, mesh, camera, depth, out);
      } else {
        sweep_octree(plan, bm, mesh, camera, out);
      }
    }
  }
  return out;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  std::vector<BenchSummary> out;
  std::vector<std::vector<double>> times;
  for (const BenchRecord& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BenchSummary& s) {
      return s.mesh == r.mesh && s.engine == r.engine && s.level == r.level && s.radius == r.radius;
    });
    if (it == out.end()) {
      BenchSummary s;
      s.mesh = r.mesh;
      s.engine = r.engine;
      s.level = r.level;
      s.radius = r.radius;
      out.push_back(s);
      times.emplace_back();
      it = out.end() - 1;
    }
    const std::size_t k = static_cast<std::size_t>(it - out.begin());
    if (r.build_ms) it->build_ms = r.build_ms;
    if (r.peak_bytes) it->peak_bytes = r.peak_bytes;
    if (!r.time_ms) continue;
    times[k].push_back(*r.time_ms);
    it->cells = r.cells;
    it->transfer_bytes = r.transfer_bytes;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& t = times[k];
    out[k].completed = t.size();
    if (t.empty()) continue;
    std::sort(t.begin(), t.end());
    const std::size_t n = t.size();
    out[k].median_ms = n % 2 == 1 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
    out[k].min_ms = t.front();
    out[k].max_ms = t.back();
  }
  return out;
}

std::vector<TransferRecord> run_transfer_report(const BenchPlan& plan) {
  plan.validate();
  std::vector<TransferRecord> out;
  for (const BenchMesh& bm : plan.meshes) {
    const TriangleMesh mesh = load_bench_mesh(bm);
    const Camera camera = bench_camera(plan.camera, mesh);
    const Vec2 at = stroke_position(plan, camera);
    const int radius = plan.radii.empty() ? 10 : plan.radii.front();
    for (BenchEngine engine : plan.engines) {
      if (engine == BenchEngine::kTexture) {
        const DepthMap depth = render_depth(mesh, camera, plan.raster);
        for (int res : plan.resolutions) {
          TransferRecord rec{bm.name, engine, res, std::nullopt};
          try {
            TexturePool pool(std::max<std::uint64_t>(TexturePool::default_texel_budget(),
                                                     2ull * static_cast<std::uint64_t>(res) * res));
            InformationLayer layer = create_layer(pool, float_layer_spec("transfer", res));
            const EditResult r = apply_stroke(mesh, camera, depth,
                                              make_circle_tool(at.x(), at.y(), radius, 1.0), layer,
                                              StrokeOptions{.raster = plan.raster});
            rec.bytes_per_stroke = r.transfer_bytes;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kCapacityExceeded) throw;
          }
          out.push_back(rec);
        }
      } else {
        for (int depth : plan.depths) {
          TransferRecord rec{bm.name, engine, depth, std::nullopt};
          try {
            const SurfaceOctree octree =
                build_octree(mesh, depth, {.root = std::nullopt,
                                           .memory_budget = plan.octree_memory_budget});
            OctreeLayer layer(octree, ElementKind::kFloat32);
            rec.bytes_per_stroke =
                octree_edit(octree, layer, mesh, camera,
                            make_circle_tool(at.x(), at.y(), radius, 1.0), 1.0)
                    .transfer_bytes;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kMemoryBudgetExceeded) throw;
          }
          out.push_back(rec);
        }
      }
    }
  }
  return out;
}

double texture_precision(const TriangleMesh& mesh, int resolution) {
  const std::size_t covered = uv_coverage(mesh, resolution).count();
  if (covered == 0) return std::numeric_limits<double>::infinity();
  return mesh_surface_area(mesh) * square_cm_per_unit(mesh.units()) / static_cast<double>(covered);
}

std::vector<PrecisionRecord> run_precision_table(const BenchPlan& plan) {
  plan.validate();
  std::vector<PrecisionRecord> out;
  for (const BenchMesh& bm : plan.meshes) {
    const TriangleMesh mesh = load_bench_mesh(bm);
    for (std::size_t i = 0; i < plan.resolutions.size(); ++i) {
      PrecisionRecord rec;
      rec.mesh = bm.name;
      rec.resolution = plan.resolutions[i];
      rec.depth = plan.depths[i];
      rec.covered_texels = uv_coverage(mesh, rec.resolution, rec.resolution, plan.raster).count();
      rec.texture_cm2 = rec.covered_texels == 0
                            ? std::numeric_limits<double>::infinity()
                            : mesh_surface_area(mesh) * square_cm_per_unit(mesh.units()) /
                                  static_cast<double>(rec.covered_texels);
      try {
        const SurfaceOctree octree = build_octree(
            mesh, rec.depth, {.root = std::nullopt, .memory_budget = plan.octree_memory_budget});
        rec.leaves = octree.leaf_count();
        rec.octree_cm2 = octree_precision(octree, mesh);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMemoryBudgetExceeded) throw;
      }
      out.push_back(rec);
    }
  }
  return out;
}

namespace {

void csv_number(std::string& out, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  out.append(buf, r.ptr);
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::string out(kBenchCsvHeader);
  out += '\n';
  for (const BenchRecord& r : records) {
    out += csv_text(r.mesh);
    out += ',';
    out += bench_engine_name(r.engine);
    out += ',' + std::to_string(r.level) + ',' + std::to_string(r.radius) + ',' +
           std::to_string(r.rep) + ',';
    if (r.time_ms) csv_number(out, *r.time_ms);
    out += ',';
    if (r.cells) out += std::to_string(*r.cells);
    out += ',';
    if (r.transfer_bytes) out += std::to_string(*r.transfer_bytes);
    out += ',';
    if (r.build_ms) csv_number(out, *r.build_ms);
    out += ',';
    if (r.peak_bytes) out += std::to_string(*r.peak_bytes);
    out += '\n';
  }
  return out;
}

}  // namespace texlayer
