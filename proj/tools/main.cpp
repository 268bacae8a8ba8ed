#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "texlayer/bench.hpp"
#include "texlayer/error.hpp"
#include "texlayer/mesh_io.hpp"
#include "texlayer/project.hpp"
#include "texlayer/protocol.hpp"
#include "texlayer/server.hpp"

namespace fs = std::filesystem;
using namespace texlayer;

namespace {

std::uint64_t texel_budget() {
  const char* env = std::getenv("TEXLAYER_TEXEL_BUDGET");
  if (env == nullptr || *env == '\0') return TexturePool::default_texel_budget();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) {
    fail(ErrorCode::kInvalidArgument, "TEXLAYER_TEXEL_BUDGET must be a positive integer");
  }
  return v;
}

bool has_project(const fs::path& dir) { return fs::exists(dir / "manifest.json"); }

void open_project(Project& project, const fs::path& dir) {
  if (has_project(dir)) project.load(dir);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

LengthUnit unit_option(const std::string& text) {
  const auto u = parse_length_unit(text);
  if (!u) fail(ErrorCode::kInvalidArgument, "unknown unit '" + text + "'");
  return *u;
}

int run_serve(const fs::path& dir, const std::string& listen) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Project project(texel_budget());
  open_project(project, dir);
  Dispatcher dispatcher(project, dir);
  Server server(dispatcher, parse_endpoint(listen));
  server.start();
  std::cout << "listening on port " << server.port() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  return 0;
}

int run_import(const fs::path& file, const fs::path& dir, const std::string& units) {
  TriangleMesh mesh = load_mesh_file(file, unit_option(units));
  std::cout << file.filename().string() << ": " << mesh.vertex_count() << " vertices, "
            << mesh.triangle_count() << " triangles, area " << mesh_surface_area(mesh) << " "
            << length_unit_name(mesh.units()) << "^2\n";
  if (dir.empty()) return 0;
  Project project(texel_budget());
  open_project(project, dir);
  project.load_model(std::move(mesh));
  project.save(dir);
  return 0;
}

int run_new_layer(const fs::path& dir, LayerSpec spec, const std::string& element) {
  if (!element.empty()) {
    const auto e = parse_element_kind(element);
    if (!e) fail(ErrorCode::kInvalidArgument, "unknown element '" + element + "'");
    spec.element = *e;
  }
  Project project(texel_budget());
  open_project(project, dir);
  const ProjectLayer& l = project.create_layer(std::move(spec));
  project.save(dir);
  std::cout << "layer " << l.id << " (" << l.layer.width() << "x" << l.layer.height() << ")\n";
  return 0;
}

int run_bench(const fs::path& plan_path, const fs::path& out, const std::string& report) {
  const BenchPlan plan = parse_bench_plan(read_file(plan_path));
  std::ostringstream csv;
  if (report == "sweep") {
    const auto records = run_radius_sweep(plan);
    csv << bench_csv(records);
    for (const BenchSummary& s : summarize(records)) {
      std::cerr << s.mesh << " " << bench_engine_name(s.engine) << " " << s.level << " r" << s.radius
                << ": ";
      if (s.median_ms) {
        std::cerr << *s.median_ms << " ms\n";
      } else {
        std::cerr << "missing\n";
      }
    }
  } else if (report == "transfer") {
    csv << "mesh,engine,level,bytes_per_stroke\r\n";
    for (const TransferRecord& r : run_transfer_report(plan)) {
      csv << r.mesh << ',' << bench_engine_name(r.engine) << ',' << r.level << ',';
      if (r.bytes_per_stroke) csv << *r.bytes_per_stroke;
      csv << "\r\n";
    }
  } else {
    csv << "mesh,resolution,depth,texture_cm2,octree_cm2,covered_texels,leaves\r\n";
    csv.precision(17);
    for (const PrecisionRecord& r : run_precision_table(plan)) {
      csv << r.mesh << ',' << r.resolution << ',' << r.depth << ',' << r.texture_cm2 << ',';
      if (r.octree_cm2) csv << *r.octree_cm2;
      csv << ',' << r.covered_texels << ',';
      if (r.leaves) csv << *r.leaves;
      csv << "\r\n";
    }
  }
  if (out.empty() || out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream file(out, std::ios::binary);
    file << csv.str();
    if (!file) fail(ErrorCode::kIoError, "cannot write " + out.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"texlayer: information layers painted onto textured meshes"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Run the WebSocket editing service");
  fs::path serve_dir;
  std::string listen = "127.0.0.1:8765";
  serve->add_option("--project", serve_dir, "Project directory")->required();
  serve->add_option("--listen", listen, "host:port, port 0 picks a free one");

  auto* import = app.add_subcommand("import-mesh", "Load a mesh and store it in a project");
  fs::path mesh_file, import_dir;
  std::string units = "m";
  import->add_option("file", mesh_file, "OBJ or PLY file")->required()->check(CLI::ExistingFile);
  import->add_option("--project", import_dir, "Project directory to update");
  import->add_option("--units", units, "Length unit of the mesh coordinates");

  auto* new_layer = app.add_subcommand("new-layer", "Add an empty information layer");
  fs::path layer_dir = ".";
  LayerSpec spec;
  std::string kind = "numeric", element;
  int size = 1024;
  new_layer->add_option("--project", layer_dir, "Project directory");
  new_layer->add_option("--name", spec.name, "Layer name")->required();
  new_layer->add_option("--kind", kind, "numeric or database")
      ->check(CLI::IsMember({"numeric", "database"}));
  new_layer->add_option("--size", size, "Texture side in texels")->check(CLI::PositiveNumber);
  new_layer->add_option("--table", spec.table, "Table referenced by a database layer");
  new_layer->add_option("--element", element, "Element type of a numeric layer (int8, int16, int32, float16, float32)");

  auto* bench = app.add_subcommand("bench", "Run a benchmark plan and write CSV");
  fs::path plan_path, out;
  std::string report = "sweep";
  bench->add_option("--plan", plan_path, "Plan JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out, "CSV output, - for stdout");
  bench->add_option("--report", report, "sweep, transfer or precision")
      ->check(CLI::IsMember({"sweep", "transfer", "precision"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(serve_dir, listen);
    if (*import) return run_import(mesh_file, import_dir, units);
    if (*new_layer) {
      spec.kind = kind == "database" ? LayerKind::kDatabase : LayerKind::kNumeric;
      if (spec.kind == LayerKind::kDatabase) spec.element = ElementKind::kUInt32;
      spec.width = spec.height = size;
      return run_new_layer(layer_dir, std::move(spec), element);
    }
    if (*bench) return run_bench(plan_path, out, report);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return 1;
}
