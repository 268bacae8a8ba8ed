#include "texlayer/camera.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstring>
#include <numbers>

#include "texlayer/error.hpp"

namespace texlayer {

namespace {

bool invertible(const Mat4& m) {
  if (!m.allFinite()) return false;
  Eigen::FullPivLU<Mat4> lu(m);
  return lu.rank() == 4;
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

}  // namespace

Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 f = (target - eye).normalized();
  const Vec3 s = f.cross(up).normalized();
  const Vec3 u = s.cross(f);
  Mat4 m = Mat4::Identity();
  m.block<1, 3>(0, 0) = s.transpose();
  m.block<1, 3>(1, 0) = u.transpose();
  m.block<1, 3>(2, 0) = -f.transpose();
  m(0, 3) = -s.dot(eye);
  m(1, 3) = -u.dot(eye);
  m(2, 3) = f.dot(eye);
  return m;
}

Mat4 perspective(double fovy_degrees, double aspect, double near_plane, double far_plane) {
  const double f = 1.0 / std::tan(fovy_degrees * std::numbers::pi / 360.0);
  Mat4 m = Mat4::Zero();
  m(0, 0) = f / aspect;
  m(1, 1) = f;
  m(2, 2) = (far_plane + near_plane) / (near_plane - far_plane);
  m(2, 3) = 2.0 * far_plane * near_plane / (near_plane - far_plane);
  m(3, 2) = -1.0;
  return m;
}

Mat4 orthographic(double left, double right, double bottom, double top, double near_plane,
                  double far_plane) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = 2.0 / (right - left);
  m(1, 1) = 2.0 / (top - bottom);
  m(2, 2) = -2.0 / (far_plane - near_plane);
  m(0, 3) = -(right + left) / (right - left);
  m(1, 3) = -(top + bottom) / (top - bottom);
  m(2, 3) = -(far_plane + near_plane) / (far_plane - near_plane);
  return m;
}

Camera Camera::look_at_perspective(const Vec3& eye, const Vec3& target, const Vec3& up,
                                   double fovy_degrees, double near_plane, double far_plane,
                                   int width, int height) {
  Camera c;
  c.view = look_at(eye, target, up);
  c.projection = perspective(fovy_degrees, static_cast<double>(width) / height, near_plane,
                             far_plane);
  c.width = width;
  c.height = height;
  return c;
}

Camera Camera::look_at_orthographic(const Vec3& eye, const Vec3& target, const Vec3& up,
                                    double half_height, double near_plane, double far_plane,
                                    int width, int height) {
  Camera c;
  const double half_width = half_height * static_cast<double>(width) / height;
  c.view = look_at(eye, target, up);
  c.projection = orthographic(-half_width, half_width, -half_height, half_height, near_plane,
                              far_plane);
  c.width = width;
  c.height = height;
  return c;
}

void Camera::validate() const {
  if (width < 1 || height < 1) fail(ErrorCode::kDegenerateCamera, "viewport must be at least 1x1");
  if (!invertible(view)) fail(ErrorCode::kDegenerateCamera, "view transform is not invertible");
  if (!invertible(projection)) {
    fail(ErrorCode::kDegenerateCamera, "projection transform is not invertible");
  }
}

std::uint64_t Camera::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  fnv1a(h, view.data(), sizeof(double) * 16);
  fnv1a(h, projection.data(), sizeof(double) * 16);
  fnv1a(h, &width, sizeof(width));
  fnv1a(h, &height, sizeof(height));
  return h;
}

std::optional<Vec3> project_to_window(const Camera& camera, const Vec3& world) {
  const Vec4 clip = camera.view_projection() * world.homogeneous();
  if (!(clip.w() > 0.0)) return std::nullopt;
  const Vec3 ndc = clip.head<3>() / clip.w();
  return Vec3((ndc.x() + 1.0) * 0.5 * camera.width, (ndc.y() + 1.0) * 0.5 * camera.height,
              (ndc.z() + 1.0) * 0.5);
}

Ray camera_ray(const Camera& camera, double window_x, double window_y) {
  return camera_ray(camera.view_projection().inverse(), camera.width, camera.height, window_x,
                    window_y);
}

Ray camera_ray(const Mat4& inv, int width, int height, double window_x, double window_y) {
  const double nx = 2.0 * window_x / width - 1.0;
  const double ny = 2.0 * window_y / height - 1.0;
  const Vec4 n = inv * Vec4(nx, ny, -1.0, 1.0);
  const Vec4 f = inv * Vec4(nx, ny, 1.0, 1.0);
  const Vec3 near_point = n.head<3>() / n.w();
  const Vec3 far_point = f.head<3>() / f.w();
  return {near_point, far_point - near_point};
}

}  // namespace texlayer
