#include "texlayer/raster.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace texlayer {

void for_each_row_band(int height, const RasterConfig& config,
                       const std::function<void(int, int)>& band) {
  if (height <= 0) return;
  if (config.backend == RasterBackend::kReference) {
    band(0, height);
    return;
  }
  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(height));
  const int rows_per_band = (height + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (int begin = 0; begin < height; begin += rows_per_band) {
    const int end = std::min(height, begin + rows_per_band);
    workers.emplace_back([&band, begin, end] { band(begin, end); });
  }
}

std::size_t rasterize(std::span<const RasterTriangle> triangles,
                      std::span<TexturePlane* const> targets, const FragmentRule& rule,
                      const RasterConfig& config) {
  if (targets.empty()) return 0;
  if (targets.size() > kMaxRasterTargets) {
    fail(ErrorCode::kInvalidArgument, "too many raster targets");
  }
  const int width = targets[0]->width();
  const int height = targets[0]->height();
  for (const TexturePlane* t : targets) {
    if (t->width() != width || t->height() != height) {
      fail(ErrorCode::kTargetMismatch, "raster targets differ in dimensions");
    }
  }

  std::vector<std::uint8_t> written(static_cast<std::size_t>(width) * height, 0);
  for_each_row_band(height, config, [&](int row_begin, int row_end) {
    for (std::size_t ti = 0; ti < triangles.size(); ++ti) {
      const RasterTriangle& tri = triangles[ti];
      scan_triangle(tri[0].position, tri[1].position, tri[2].position, width, row_begin, row_end,
                    [&](int x, int y, double b0, double b1, double b2) {
                      const auto w = perspective_weights(b0, b1, b2, tri[0].w, tri[1].w, tri[2].w);
                      Fragment frag;
                      frag.x = x;
                      frag.y = y;
                      frag.triangle = ti;
                      for (std::size_t k = 0; k < kMaxRasterAttributes; ++k) {
                        frag.attributes[k] = w[0] * tri[0].attributes[k] +
                                             w[1] * tri[1].attributes[k] +
                                             w[2] * tri[2].attributes[k];
                      }
                      const FragmentOutput out = rule(frag);
                      if (!out.keep) return;
                      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
                      for (std::size_t k = 0; k < targets.size(); ++k) {
                        targets[k]->set_value(idx, out.values[k]);
                      }
                      written[idx] = 1;
                    });
    }
  });
  return static_cast<std::size_t>(std::count(written.begin(), written.end(), std::uint8_t{1}));
}

}  // namespace texlayer
