#pragma once

#include <filesystem>
#include <string_view>

#include "texlayer/grid.hpp"

namespace texlayer {

/// Brush placed in window coordinates. The shape grid covers a
/// shape.width x shape.height pixel block centered on (x, y); row 0 is the
/// bottom row, like every other grid.
struct EditingTool {
  double x = 0.0;
  double y = 0.0;
  BoolGrid shape;
  double value = 1.0;
  int kernel_radius = 1;

  int shape_width() const { return shape.width; }
  int shape_height() const { return shape.height; }

  /// Throws InvalidArgument when the shape is empty or the radius negative.
  void validate() const;
};

/// (2r+1)^2 grid, true where (i-r)^2 + (j-r)^2 <= r^2.
BoolGrid circle_shape(int radius);
/// (2r+1)^2 grid, all true.
BoolGrid square_shape(int radius);

/// Mask from a PBM (P1/P4) or PGM (P2/P5) image: nonzero gray, or black in
/// PBM, is inside. Image rows run top-down, so they are flipped. Throws
/// ParseError on malformed input.
BoolGrid load_pgm_mask(std::string_view bytes);
/// Mask from a PNG: pixels with nonzero luminance and alpha are inside.
BoolGrid load_png_mask(std::string_view bytes);
/// Picks the PNG or PBM/PGM reader from the file signature.
BoolGrid load_mask_file(const std::filesystem::path& path);

/// Circle tool of the given pixel radius centered on window (x, y).
EditingTool make_circle_tool(double x, double y, int radius, double value, int kernel_radius = 1);
EditingTool make_square_tool(double x, double y, int radius, double value, int kernel_radius = 1);

}  // namespace texlayer
