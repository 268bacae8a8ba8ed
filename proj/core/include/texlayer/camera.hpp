#pragma once

#include <cstdint>
#include <optional>

#include "texlayer/math.hpp"

namespace texlayer {

/// View and projection transforms plus the viewport in pixels. Window
/// coordinates follow the raster convention: origin at the bottom-left
/// corner, pixel (x, y) centered at (x + 0.5, y + 0.5), depth in [0, 1]
/// with 1 = far.
struct Camera {
  Mat4 view = Mat4::Identity();
  Mat4 projection = Mat4::Identity();
  int width = 1;
  int height = 1;

  static Camera look_at_perspective(const Vec3& eye, const Vec3& target, const Vec3& up,
                                    double fovy_degrees, double near_plane, double far_plane,
                                    int width, int height);
  static Camera look_at_orthographic(const Vec3& eye, const Vec3& target, const Vec3& up,
                                     double half_height, double near_plane, double far_plane,
                                     int width, int height);

  Mat4 view_projection() const { return projection * view; }

  /// Throws DegenerateCamera for non-finite or singular transforms or an
  /// empty viewport.
  void validate() const;

  /// Hash of the transforms and viewport; equal cameras hash equal.
  std::uint64_t fingerprint() const;
};

Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up);
Mat4 perspective(double fovy_degrees, double aspect, double near_plane, double far_plane);
Mat4 orthographic(double left, double right, double bottom, double top, double near_plane,
                  double far_plane);

/// Window position (x, y, depth) of a world point, or nullopt when it lies
/// behind the camera (clip w <= 0).
std::optional<Vec3> project_to_window(const Camera& camera, const Vec3& world);

/// Segment through a window position: origin on the near plane, origin +
/// direction on the far plane.
struct Ray {
  Vec3 origin;
  Vec3 direction;
};

Ray camera_ray(const Camera& camera, double window_x, double window_y);
/// Same, with the inverse view-projection computed once by the caller.
Ray camera_ray(const Mat4& inverse_view_projection, int width, int height, double window_x,
               double window_y);

}  // namespace texlayer
