#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texlayer/element.hpp"

namespace texlayer {

struct Color {
  float r = 0.0f, g = 0.0f, b = 0.0f, a = 0.0f;
  bool operator==(const Color&) const = default;
};

Rgba8 to_rgba8(const Color& c);

struct ControlPoint {
  float position = 0.0f;
  Color color;
  bool operator==(const ControlPoint&) const = default;
};

/// Piecewise-linear color ramp over [0, 1]. At least two control points,
/// strictly increasing positions, first at 0 and last at 1, finite colors.
class Palette {
 public:
  /// Throws InvalidArgument when the control points violate the rules above.
  static Palette create(std::vector<ControlPoint> points);
  static Palette grayscale();

  std::span<const ControlPoint> points() const { return points_; }

  /// Color at u (clamped to [0,1]); exact at control points.
  Color sample(double u) const;

  bool operator==(const Palette&) const = default;

 private:
  std::vector<ControlPoint> points_;
};

/// JSON array of {"position": p, "rgba": [r, g, b, a]}.
Palette palette_from_json(std::string_view json);
std::string palette_to_json(const Palette& palette);

}  // namespace texlayer
