#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace texlayer {

/// Dense boolean grid, row-major, row 0 at the bottom.
struct BoolGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  BoolGrid() = default;
  BoolGrid(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  bool at(int x, int y) const { return cells[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { cells[index(x, y)] = v ? 1 : 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(),
                                                  [](std::uint8_t c) { return c != 0; }));
  }
  bool operator==(const BoolGrid&) const = default;
};

}  // namespace texlayer
