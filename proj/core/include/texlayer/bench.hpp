#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texlayer/camera.hpp"
#include "texlayer/mesh.hpp"
#include "texlayer/raster.hpp"

namespace texlayer {

enum class BenchEngine { kTexture, kOctree };
std::string_view bench_engine_name(BenchEngine engine);

/// Where a benchmark mesh comes from: a built-in generator ("terrain",
/// "sphere", "scan", "flat-square") or a mesh file.
struct BenchMesh {
  std::string name;
  std::string source = "terrain";
  std::string path;  // when source == "file"
  LengthUnit units = LengthUnit::kMeters;
};

/// Camera used for every stroke of a mesh. "auto" frames the mesh bounds
/// from above (+z); "look-at" uses the explicit parameters.
struct BenchCamera {
  std::string mode = "auto";
  Vec3 eye{0, 0, 1};
  Vec3 target{0, 0, 0};
  Vec3 up{0, 1, 0};
  double fovy = 30.0;
  double near_plane = 0.01;
  double far_plane = 100.0;
  int width = 1024;
  int height = 768;
  /// Framing for "auto": fraction of the shorter bounds extent that fills
  /// the shorter viewport side.
  double zoom = 1.0;
};

struct BenchPlan {
  std::vector<BenchMesh> meshes;
  std::vector<BenchEngine> engines{BenchEngine::kTexture, BenchEngine::kOctree};
  /// Matched pairwise: resolutions[i] against depths[i].
  std::vector<int> resolutions{2048, 4096, 8192};
  std::vector<int> depths{11, 12, 13};
  std::vector<int> radii{10, 40, 70, 100, 200};
  int repetitions = 3;
  BenchCamera camera;
  /// Stroke position in window pixels; defaults to the viewport center.
  std::optional<Vec2> stroke;
  std::uint64_t octree_memory_budget = 0;  // bytes, 0 = unlimited
  RasterConfig raster;

  /// Throws InvalidArgument when repetitions < 3, radii unsorted or the
  /// level lists differ in length.
  void validate() const;
};

/// JSON plan; every field optional except meshes. See docs/bench-plan.md.
BenchPlan parse_bench_plan(std::string_view json);

/// One repetition, or one missing data point (time_ms empty) when the
/// engine could not be set up, as with an octree over the memory budget.
struct BenchRecord {
  std::string mesh;
  BenchEngine engine = BenchEngine::kTexture;
  int level = 0;  // texture side or octree depth
  int radius = 0;
  int rep = 0;
  std::optional<double> time_ms;
  std::optional<std::uint64_t> cells;
  std::optional<std::uint64_t> transfer_bytes;
  std::optional<double> build_ms;
  std::optional<std::uint64_t> peak_bytes;
  std::uint64_t input_hash = 0;  // camera + tool, equal across engines
  std::string note;              // error code of a missing point
};

struct BenchSummary {
  std::string mesh;
  BenchEngine engine = BenchEngine::kTexture;
  int level = 0;
  int radius = 0;
  std::size_t completed = 0;
  std::optional<double> median_ms;
  std::optional<double> min_ms;
  std::optional<double> max_ms;
  std::optional<std::uint64_t> cells;
  std::optional<std::uint64_t> transfer_bytes;
  std::optional<double> build_ms;
  std::optional<std::uint64_t> peak_bytes;
};

TriangleMesh load_bench_mesh(const BenchMesh& mesh);
Camera bench_camera(const BenchCamera& camera, const TriangleMesh& mesh);

/// Hash of everything an engine receives for one stroke.
std::uint64_t stroke_input_hash(const Camera& camera, double x, double y, int radius);

/// Records for every (mesh, engine, level, radius, repetition); a warm-up
/// stroke before each configuration is discarded.
std::vector<BenchRecord> run_radius_sweep(const BenchPlan& plan);

/// Medians over completed repetitions, one summary per configuration.
std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records);

struct TransferRecord {
  std::string mesh;
  BenchEngine engine = BenchEngine::kTexture;
  int level = 0;
  std::optional<std::uint64_t> bytes_per_stroke;
};
std::vector<TransferRecord> run_transfer_report(const BenchPlan& plan);

struct PrecisionRecord {
  std::string mesh;
  int resolution = 0;
  int depth = 0;
  double texture_cm2 = 0.0;
  std::optional<double> octree_cm2;
  std::uint64_t covered_texels = 0;
  std::optional<std::uint64_t> leaves;
};
std::vector<PrecisionRecord> run_precision_table(const BenchPlan& plan);

/// Surface area per covered texel in square centimetres.
double texture_precision(const TriangleMesh& mesh, int resolution);

/// CSV with the frozen header
/// mesh,engine,level,radius,rep,time_ms,cells,transfer_bytes,build_ms,peak_bytes
std::string bench_csv(const std::vector<BenchRecord>& records);
inline constexpr std::string_view kBenchCsvHeader =
    "mesh,engine,level,radius,rep,time_ms,cells,transfer_bytes,build_ms,peak_bytes";

}  // namespace texlayer
