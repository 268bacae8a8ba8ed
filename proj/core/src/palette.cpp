#include "texlayer/palette.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "texlayer/error.hpp"

namespace texlayer {

Rgba8 to_rgba8(const Color& c) {
  auto q = [](float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  };
  return {q(c.r), q(c.g), q(c.b), q(c.a)};
}

Palette Palette::create(std::vector<ControlPoint> points) {
  if (points.size() < 2) fail(ErrorCode::kInvalidArgument, "palette needs at least 2 points");
  if (points.front().position != 0.0f || points.back().position != 1.0f) {
    fail(ErrorCode::kInvalidArgument, "palette must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Color& c = points[i].color;
    for (float v : {c.r, c.g, c.b, c.a}) {
      if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "palette color is not finite");
    }
    if (i > 0 && !(points[i].position > points[i - 1].position)) {
      fail(ErrorCode::kInvalidArgument, "palette positions must increase strictly");
    }
  }
  Palette p;
  p.points_ = std::move(points);
  return p;
}

Palette Palette::grayscale() {
  return create({{0.0f, {0.0f, 0.0f, 0.0f, 1.0f}}, {1.0f, {1.0f, 1.0f, 1.0f, 1.0f}}});
}

Color Palette::sample(double u) const {
  u = std::clamp(std::isnan(u) ? 0.0 : u, 0.0, 1.0);
  // first segment whose end is >= u
  auto it = std::lower_bound(points_.begin() + 1, points_.end(), u,
                             [](const ControlPoint& p, double v) { return p.position < v; });
  if (it == points_.end()) it = points_.end() - 1;
  const ControlPoint& hi = *it;
  const ControlPoint& lo = *(it - 1);
  const double t = (u - lo.position) / (static_cast<double>(hi.position) - lo.position);
  auto mix = [t](float a, float b) {
    return static_cast<float>((1.0 - t) * static_cast<double>(a) + t * static_cast<double>(b));
  };
  return {mix(lo.color.r, hi.color.r), mix(lo.color.g, hi.color.g), mix(lo.color.b, hi.color.b),
          mix(lo.color.a, hi.color.a)};
}

Palette palette_from_json(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("palette JSON: ") + e.what());
  }
  if (!doc.is_array()) fail(ErrorCode::kParseError, "palette JSON must be an array");
  std::vector<ControlPoint> points;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("position") || !item.contains("rgba") ||
        !item["rgba"].is_array() || item["rgba"].size() != 4 || !item["position"].is_number()) {
      fail(ErrorCode::kParseError, "palette entries need position and 4-component rgba");
    }
    const auto& c = item["rgba"];
    for (const auto& v : c) {
      if (!v.is_number()) fail(ErrorCode::kParseError, "palette rgba components must be numbers");
    }
    points.push_back({item["position"].get<float>(),
                      {c[0].get<float>(), c[1].get<float>(), c[2].get<float>(), c[3].get<float>()}});
  }
  return Palette::create(std::move(points));
}

std::string palette_to_json(const Palette& palette) {
  nlohmann::json doc = nlohmann::json::array();
  for (const ControlPoint& p : palette.points()) {
    doc.push_back({{"position", p.position},
                   {"rgba", {p.color.r, p.color.g, p.color.b, p.color.a}}});
  }
  return doc.dump();
}

}  // namespace texlayer
