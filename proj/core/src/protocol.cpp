#include "texlayer/protocol.hpp"

#include <cstring>

#include "texlayer/error.hpp"
#include "texlayer/mesh_io.hpp"
#include "texlayer/palette.hpp"
#include "texlayer/procedural.hpp"
#include "texlayer/tool.hpp"

namespace texlayer {

using nlohmann::json;

std::string encode_text_frame(const WireMessage& m) {
  json env = {{"kind", m.kind}, {"id", m.id}, {"body", m.body}};
  return env.dump();
}

std::string encode_binary_frame(const WireMessage& m) {
  json env = {{"kind", m.kind}, {"id", m.id}, {"body", m.body}, {"payload_size", m.payload.size()}};
  const std::string text = env.dump();
  const auto n = static_cast<std::uint32_t>(text.size());
  std::string out;
  out.reserve(4 + text.size() + m.payload.size());
  for (int i = 0; i < 4; ++i) out += static_cast<char>((n >> (8 * i)) & 0xFFu);
  out += text;
  out += m.payload;
  return out;
}

namespace {

WireMessage envelope_from(const json& env) {
  if (!env.is_object()) fail(ErrorCode::kBadRequest, "envelope must be a JSON object");
  if (!env.contains("kind") || !env.at("kind").is_string()) {
    fail(ErrorCode::kBadRequest, "envelope needs a string kind");
  }
  WireMessage m;
  m.kind = env.at("kind").get<std::string>();
  m.id = env.value("id", json());
  m.body = env.value("body", json::object());
  if (!m.body.is_object()) fail(ErrorCode::kBadRequest, "body must be a JSON object");
  return m;
}

json parse_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::kBadRequest, "malformed JSON");
  return doc;
}

}  // namespace

WireMessage decode_frame(std::string_view frame, bool binary) {
  if (!binary) return envelope_from(parse_json(frame));
  if (frame.size() < 4) fail(ErrorCode::kBadRequest, "binary frame shorter than its header");
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) {
    n |= static_cast<std::uint32_t>(static_cast<unsigned char>(frame[static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  if (n > frame.size() - 4) fail(ErrorCode::kBadRequest, "binary frame envelope is truncated");
  const json env = parse_json(frame.substr(4, n));
  WireMessage m = envelope_from(env);
  m.payload = std::string(frame.substr(4 + n));
  if (env.contains("payload_size") &&
      env.at("payload_size").get<std::uint64_t>() != m.payload.size()) {
    fail(ErrorCode::kBadRequest, "payload_size does not match the payload");
  }
  return m;
}

WireMessage error_reply(const json& id, ErrorCode code, const std::string& message,
                        std::string_view request_kind) {
  WireMessage r;
  r.kind = "error";
  r.id = id;
  r.body = {{"code", std::string(error_code_name(code))}, {"message", message}};
  if (!request_kind.empty()) r.body["request"] = std::string(request_kind);
  return r;
}

namespace {

template <class T>
T field(const json& body, const char* key) {
  if (!body.contains(key)) fail(ErrorCode::kBadRequest, std::string("missing field '") + key + "'");
  return body.at(key).get<T>();
}

Vec3 vec3_field(const json& body, const char* key) {
  const auto& a = body.at(key);
  if (!a.is_array() || a.size() != 3) {
    fail(ErrorCode::kBadRequest, std::string("field '") + key + "' needs 3 numbers");
  }
  return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

Mat4 mat4_field(const json& body, const char* key) {
  const auto& a = body.at(key);
  if (!a.is_array() || a.size() != 16) {
    fail(ErrorCode::kBadRequest, std::string("field '") + key + "' needs 16 numbers");
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = a[static_cast<std::size_t>(r * 4 + c)].get<double>();
  return m;
}

json rect_json(const TexelRect& r) {
  return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

TexelRect rect_field(const json& body, const char* key) {
  const auto& r = body.at(key);
  return {r.at("x").get<int>(), r.at("y").get<int>(), r.at("width").get<int>(),
          r.at("height").get<int>()};
}

json palette_json(const Palette& p) { return json::parse(palette_to_json(p)); }

json layer_json(const ProjectLayer& l) {
  const InformationLayer& layer = l.layer;
  json j = {{"id", l.id},
            {"name", layer.name()},
            {"kind", std::string(layer_kind_name(layer.kind()))},
            {"element", std::string(element_kind_name(layer.element()))},
            {"width", layer.width()},
            {"height", layer.height()},
            {"visible", l.visible},
            {"valid_texels", layer.valid_texels()},
            {"limits", {layer.limits().lower, layer.limits().upper}},
            {"palette", palette_json(layer.palette())}};
  if (layer.kind() == LayerKind::kDatabase) j["table"] = layer.table();
  return j;
}

json field_json(const FieldValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return nullptr;
}

json row_json(const TableSchema& schema, const Row& row) {
  json values = json::object();
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    values[schema.columns[i].name] = field_json(row.values[i]);
  }
  return {{"id", row.id}, {"values", values}};
}

json schema_json(const TableSchema& s) {
  json cols = json::array();
  for (const Column& c : s.columns) {
    cols.push_back({{"name", c.name}, {"type", std::string(column_type_name(c.type))}});
  }
  return {{"name", s.name}, {"columns", cols}};
}

FieldValue field_from_json(const json& v) {
  if (v.is_null()) return std::monostate{};
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  fail(ErrorCode::kSchemaViolation, "row values must be null, numbers or strings");
}

TriangleMesh builtin_mesh(const std::string& name, const json& body) {
  const int segments = body.value("segments", 1);
  if (name == "quad") return make_flat_square(body.value("side", 2.0), 0.0, segments);
  if (name == "flat-square") return make_flat_square(1.0, 0.0, segments);
  if (name == "coaxial") return make_coaxial_quads(2.0, 0.0, -1.0, segments);
  if (name == "cube") return make_unit_cube();
  if (name == "terrain") {
    TerrainParams p;
    p.columns = body.value("columns", p.columns);
    p.rows = body.value("rows", p.rows);
    p.seed = body.value("seed", p.seed);
    return make_terrain(p);
  }
  if (name == "sphere") {
    SphereParams p;
    p.stacks = body.value("stacks", p.stacks);
    p.slices = body.value("slices", p.slices);
    p.bump = body.value("bump", 0.05);
    return make_uv_sphere(p);
  }
  fail(ErrorCode::kBadRequest, "unknown builtin model '" + name + "'");
}

Camera camera_from(const json& body) {
  Camera cam;
  const int width = field<int>(body, "width");
  const int height = field<int>(body, "height");
  if (body.contains("view")) {
    cam.view = mat4_field(body, "view");
    cam.projection = mat4_field(body, "projection");
    cam.width = width;
    cam.height = height;
    return cam;
  }
  const Vec3 eye = vec3_field(body, "eye");
  const Vec3 target = vec3_field(body, "target");
  const Vec3 up = body.contains("up") ? vec3_field(body, "up") : Vec3(0, 1, 0);
  const double near_plane = body.value("near", 0.1);
  const double far_plane = body.value("far", 100.0);
  const std::string mode = body.value("mode", std::string("perspective"));
  if (mode == "perspective") {
    return Camera::look_at_perspective(eye, target, up, body.value("fovy", 45.0), near_plane,
                                       far_plane, width, height);
  }
  if (mode == "orthographic") {
    return Camera::look_at_orthographic(eye, target, up, body.value("half_height", 1.0),
                                        near_plane, far_plane, width, height);
  }
  fail(ErrorCode::kBadRequest, "camera mode must be perspective or orthographic");
}

std::string rgba_payload(const std::vector<Rgba8>& pixels) {
  std::string out(pixels.size() * 4, '\0');
  std::memcpy(out.data(), pixels.data(), out.size());
  return out;
}

}  // namespace

Dispatcher::Dispatcher(Project& project, std::filesystem::path project_dir)
    : project_(project), project_dir_(std::move(project_dir)) {
  add("ping", [](const WireMessage&, WireMessage&) {});

  add("load_model", [this](const WireMessage& req, WireMessage& rep) {
    const json& b = req.body;
    LengthUnit units = LengthUnit::kMeters;
    if (b.contains("units")) {
      const auto u = parse_length_unit(b.at("units").get<std::string>());
      if (!u) fail(ErrorCode::kBadRequest, "unknown length unit");
      units = *u;
    }
    std::optional<TriangleMesh> mesh;
    if (b.contains("builtin")) {
      mesh = builtin_mesh(b.at("builtin").get<std::string>(), b).with_units(units);
    } else if (b.contains("path")) {
      mesh = load_mesh_file(b.at("path").get<std::string>(), units);
    } else if (!req.payload.empty()) {
      const std::string format = b.value("format", std::string("obj"));
      if (format != "obj" && format != "ply") fail(ErrorCode::kBadRequest, "format must be obj or ply");
      mesh = load_mesh(req.payload, format == "obj" ? MeshFormat::kObj : MeshFormat::kPly, units);
    } else {
      fail(ErrorCode::kBadRequest, "load_model needs builtin, path or a payload");
    }
    project_.load_model(std::move(*mesh));
    const TriangleMesh& m = project_.mesh();
    const Box3& bb = m.bounds();
    rep.body = {{"vertices", m.vertex_count()},
                {"triangles", m.triangle_count()},
                {"units", std::string(length_unit_name(m.units()))},
                {"bounds",
                 {{"min", {bb.min.x(), bb.min.y(), bb.min.z()}},
                  {"max", {bb.max.x(), bb.max.y(), bb.max.z()}}}},
                {"generation", project_.generation()}};
  });

  add("set_camera", [this](const WireMessage& req, WireMessage& rep) {
    project_.set_camera(camera_from(req.body));
    rep.body = {{"generation", project_.generation()}};
  });

  add("list_layers", [this](const WireMessage&, WireMessage& rep) {
    json layers = json::array();
    for (const ProjectLayer* l : project_.layers()) layers.push_back(layer_json(*l));
    rep.body = {{"layers", layers}};
  });

  add("create_layer", [this](const WireMessage& req, WireMessage& rep) {
    const json& b = req.body;
    LayerSpec spec;
    spec.name = field<std::string>(b, "name");
    const std::string kind = b.value("kind", std::string("numeric"));
    if (kind == "numeric") {
      spec.kind = LayerKind::kNumeric;
    } else if (kind == "database") {
      spec.kind = LayerKind::kDatabase;
      spec.table = field<std::string>(b, "table");
      spec.element = ElementKind::kUInt32;
    } else {
      fail(ErrorCode::kBadRequest, "layer kind must be numeric or database");
    }
    if (b.contains("element")) {
      const auto e = parse_element_kind(b.at("element").get<std::string>());
      if (!e) fail(ErrorCode::kBadRequest, "unknown element kind");
      spec.element = *e;
    }
    if (b.contains("size")) {
      spec.width = spec.height = b.at("size").get<int>();
    } else {
      spec.width = field<int>(b, "width");
      spec.height = field<int>(b, "height");
    }
    if (b.contains("limits")) {
      spec.limits = {b.at("limits").at(0).get<double>(), b.at("limits").at(1).get<double>()};
    }
    if (b.contains("palette")) spec.palette = palette_from_json(b.at("palette").dump());
    rep.body = {{"layer", layer_json(project_.create_layer(std::move(spec)))}};
  });

  add("set_palette", [this](const WireMessage& req, WireMessage& rep) {
    ProjectLayer& l = project_.layer(field<std::uint32_t>(req.body, "layer"));
    Palette palette = palette_from_json(req.body.at("palette").dump());
    if (req.body.contains("limits")) {
      const auto& lim = req.body.at("limits");
      l.layer.set_limits({lim.at(0).get<double>(), lim.at(1).get<double>()});
    }
    l.layer.set_palette(std::move(palette));
    rep.body = {{"layer", layer_json(l)}};
  });

  add("set_visibility", [this](const WireMessage& req, WireMessage& rep) {
    const auto id = field<std::uint32_t>(req.body, "layer");
    project_.set_visibility(id, field<bool>(req.body, "visible"));
    rep.body = {{"layer", layer_json(project_.layer(id))}};
  });

  add("stroke", [this](const WireMessage& req, WireMessage& rep) {
    const json& b = req.body;
    const auto id = field<std::uint32_t>(b, "layer");
    const int radius = field<int>(b, "radius");
    const std::string shape = b.value("shape", std::string("circle"));
    const double value = checked_layer_value(project_.layer(id).layer, field<double>(b, "value"));
    EditingTool tool;
    if (shape == "circle") {
      tool = make_circle_tool(field<double>(b, "x"), field<double>(b, "y"), radius, value,
                              b.value("kernel_radius", 1));
    } else if (shape == "square") {
      tool = make_square_tool(field<double>(b, "x"), field<double>(b, "y"), radius, value,
                              b.value("kernel_radius", 1));
    } else {
      fail(ErrorCode::kBadRequest, "tool shape must be circle or square");
    }
    const EditResult r = project_.stroke(id, tool);
    const InformationLayer& layer = project_.layer(id).layer;
    rep.body = {{"layer", id},
                {"dirty", rect_json(r.dirty)},
                {"edited", r.edited.size()},
                {"padded", r.padded.size()},
                {"transfer_bytes", r.transfer_bytes},
                {"fragments", r.fragments_visited},
                {"generation", project_.generation()},
                {"format", "rgba8"}};
    if (!r.dirty.empty()) rep.payload = rgba_payload(resolve_display_rect(layer, r.dirty));
  });

  add("get_display_patch", [this](const WireMessage& req, WireMessage& rep) {
    const auto id = field<std::uint32_t>(req.body, "layer");
    const InformationLayer& layer = project_.layer(id).layer;
    const TexelRect rect = req.body.contains("rect")
                               ? rect_field(req.body, "rect")
                               : TexelRect{0, 0, layer.width(), layer.height()};
    if (rect.x < 0 || rect.y < 0 || rect.width < 0 || rect.height < 0 ||
        rect.x + rect.width > layer.width() || rect.y + rect.height > layer.height()) {
      fail(ErrorCode::kInvalidArgument, "rect lies outside the layer");
    }
    rep.body = {{"layer", id}, {"rect", rect_json(rect)}, {"format", "rgba8"}};
    if (!rect.empty()) rep.payload = rgba_payload(resolve_display_rect(layer, rect));
  });

  add("rows_in_region", [this](const WireMessage& req, WireMessage& rep) {
    const InformationLayer& layer = project_.layer(field<std::uint32_t>(req.body, "layer")).layer;
    RegionRows rows;
    if (req.body.contains("texels")) {
      const auto texels = req.body.at("texels").get<std::vector<std::uint32_t>>();
      rows = rows_for_layer_region(project_.tables(), layer, texels);
    } else {
      rows = rows_for_layer_region(project_.tables(), layer, rect_field(req.body, "rect"));
    }
    const TableSchema schema = project_.tables().schema(layer.table());
    json out = json::array();
    for (const Row& row : rows.rows) out.push_back(row_json(schema, row));
    rep.body = {{"table", layer.table()}, {"keys", rows.keys}, {"rows", out},
                {"dangling", rows.dangling}};
  });

  add("create_table", [this](const WireMessage& req, WireMessage& rep) {
    TableSchema schema;
    schema.name = field<std::string>(req.body, "name");
    for (const auto& c : req.body.value("columns", json::array())) {
      const auto type = parse_column_type(c.at("type").get<std::string>());
      if (!type) fail(ErrorCode::kBadSchema, "unknown column type");
      schema.columns.push_back({c.at("name").get<std::string>(), *type});
    }
    project_.tables().create_table(schema);
    rep.body = {{"table", schema_json(schema)}};
  });

  add("upsert_row", [this](const WireMessage& req, WireMessage& rep) {
    const auto table = field<std::string>(req.body, "table");
    const TableSchema schema = project_.tables().schema(table);
    const auto id = field<std::int64_t>(req.body, "id");
    if (id < 0 || id > 0xFFFFFFFFll) fail(ErrorCode::kSchemaViolation, "id must be a uint32");
    Row row{static_cast<std::uint32_t>(id), {}};
    const json values = req.body.value("values", json::object());
    for (auto it = values.begin(); it != values.end(); ++it) {
      const bool known = std::any_of(schema.columns.begin(), schema.columns.end(),
                                     [&](const Column& c) { return c.name == it.key(); });
      if (!known) fail(ErrorCode::kSchemaViolation, "unknown column '" + it.key() + "'");
    }
    for (const Column& c : schema.columns) {
      row.values.push_back(values.contains(c.name) ? field_from_json(values.at(c.name))
                                                   : FieldValue{});
    }
    rep.body = {{"table", table}, {"row", row_json(schema, project_.tables().upsert_row(table, row))}};
  });

  add("delete_row", [this](const WireMessage& req, WireMessage& rep) {
    const auto table = field<std::string>(req.body, "table");
    const bool removed = project_.tables().delete_row(table, field<std::uint32_t>(req.body, "id"));
    rep.body = {{"table", table}, {"removed", removed}};
  });

  add("list_tables", [this](const WireMessage&, WireMessage& rep) {
    json tables = json::array();
    for (const std::string& name : project_.tables().table_names()) {
      json t = schema_json(project_.tables().schema(name));
      t["rows"] = project_.tables().row_count(name);
      tables.push_back(t);
    }
    rep.body = {{"tables", tables}};
  });

  add("save_project", [this](const WireMessage& req, WireMessage& rep) {
    const std::filesystem::path dir =
        req.body.contains("path") ? std::filesystem::path(req.body.at("path").get<std::string>())
                                  : project_dir_;
    if (dir.empty()) fail(ErrorCode::kBadRequest, "no project directory");
    project_.save(dir);
    rep.body = {{"path", dir.string()}};
  });

  add("load_project", [this](const WireMessage& req, WireMessage& rep) {
    const std::filesystem::path dir =
        req.body.contains("path") ? std::filesystem::path(req.body.at("path").get<std::string>())
                                  : project_dir_;
    if (dir.empty()) fail(ErrorCode::kBadRequest, "no project directory");
    project_.load(dir);
    rep.body = {{"path", dir.string()},
                {"layers", project_.layers().size()},
                {"generation", project_.generation()}};
  });
}

void Dispatcher::add(std::string kind, Handler handler) {
  order_.push_back(kind);
  handlers_.emplace(std::move(kind), std::move(handler));
}

std::vector<std::string> Dispatcher::request_kinds() const { return order_; }

WireMessage Dispatcher::handle(const WireMessage& request) {
  const auto it = handlers_.find(request.kind);
  if (it == handlers_.end()) {
    return error_reply(request.id, ErrorCode::kBadRequest, "unknown message kind '" + request.kind + "'",
                       request.kind);
  }
  WireMessage reply;
  reply.kind = request.kind == "ping" ? "pong" : request.kind + "_result";
  reply.id = request.id;
  try {
    it->second(request, reply);
  } catch (const Error& e) {
    return error_reply(request.id, e.code(), e.what(), request.kind);
  } catch (const json::exception& e) {
    return error_reply(request.id, ErrorCode::kBadRequest, e.what(), request.kind);
  } catch (const std::exception& e) {
    return error_reply(request.id, ErrorCode::kIoError, e.what(), request.kind);
  }
  return reply;
}

WireMessage Dispatcher::handle_frame(std::string_view frame, bool binary) {
  WireMessage request;
  try {
    request = decode_frame(frame, binary);
  } catch (const Error& e) {
    return error_reply(nullptr, e.code(), e.what());
  } catch (const json::exception& e) {
    return error_reply(nullptr, ErrorCode::kBadRequest, e.what());
  }
  return handle(request);
}

}  // namespace texlayer
