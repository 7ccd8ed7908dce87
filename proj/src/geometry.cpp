#include "moto2d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace moto2d {

namespace {

// Snap values that are pure rounding noise so that axis-aligned angles
// produce exact unit vectors.
double snap(double v) {
  if (std::abs(v) < 1e-12) return 0.0;
  if (std::abs(v - 1.0) < 1e-12) return 1.0;
  if (std::abs(v + 1.0) < 1e-12) return -1.0;
  return v;
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Half-extent of a rectangle projected onto the unit axis u.
double rect_support(const Rect& r, Vec2 u) {
  return 0.5 * r.w * std::abs(r.u1().dot(u)) + 0.5 * r.h * std::abs(r.u2().dot(u));
}

}  // namespace

double cos_deg(double deg) { return snap(std::cos(deg_to_rad(deg))); }
double sin_deg(double deg) { return snap(std::sin(deg_to_rad(deg))); }

double normalize_angle_deg(double deg) {
  double a = std::fmod(deg, 180.0);
  if (a < 0.0) a += 180.0;
  return a;
}

double Vec2::norm() const { return std::hypot(x, y); }

Vec2 Vec2::rotated(double deg) const {
  const double c = cos_deg(deg);
  const double s = sin_deg(deg);
  return {c * x - s * y, s * x + c * y};
}

Rect::Rect(double w_, double h_, double x_, double y_, double theta)
    : w(w_), h(h_), x(x_), y(y_), theta_deg(normalize_angle_deg(theta)) {
  if (!(w > 0.0) || !(h > 0.0)) throw std::invalid_argument("Rect: non-positive dimensions");
}

std::vector<Vec2> Rect::corners() const {
  const Vec2 a = u1() * (0.5 * w);
  const Vec2 b = u2() * (0.5 * h);
  const Vec2 c = center();
  return {c + a + b, c - a + b, c - a - b, c + a - b};
}

Rect Rect::rotated_about_origin(double gamma_deg) const {
  Rect out = *this;
  const Vec2 c = center().rotated(gamma_deg);
  out.x = c.x;
  out.y = c.y;
  out.theta_deg = normalize_angle_deg(theta_deg + gamma_deg);
  return out;
}

Circle::Circle(double r_, double x_, double y_, double theta_p)
    : r(r_), x(x_), y(y_), theta_p_deg(theta_p) {
  if (!(r > 0.0)) throw std::invalid_argument("Circle: non-positive radius");
}

Circle Circle::rotated_about_origin(double gamma_deg) const {
  Circle out = *this;
  const Vec2 c = center().rotated(gamma_deg);
  out.x = c.x;
  out.y = c.y;
  return out;
}

DesignSpace::DesignSpace(double x_min_, double x_max_, double y_min_, double y_max_)
    : x_min(x_min_), x_max(x_max_), y_min(y_min_), y_max(y_max_) {
  if (!(x_min < x_max) || !(y_min < y_max))
    throw std::invalid_argument("DesignSpace: empty extent");
}

std::vector<double> discretize_angles(int n_a) {
  if (n_a < 2 || n_a % 2 != 0)
    throw std::invalid_argument("discretize_angles: n_a must be even and >= 2");
  std::vector<double> out(static_cast<size_t>(n_a));
  for (int k = 0; k < n_a; ++k) out[static_cast<size_t>(k)] = 180.0 * k / n_a;
  return out;
}

std::vector<double> discretize_projected_angles(int n_pa) {
  if (n_pa < 2) throw std::invalid_argument("discretize_projected_angles: n_pa must be >= 2");
  std::vector<double> out(static_cast<size_t>(n_pa));
  for (int k = 0; k < n_pa; ++k) out[static_cast<size_t>(k)] = 180.0 * k / (n_pa - 1);
  return out;
}

AngleScheme::AngleScheme(int n_a_, int n_pa_)
    : n_a(n_a_),
      n_pa(n_pa_),
      rect_angles_deg(discretize_angles(n_a_)),
      projected_angles_deg(discretize_projected_angles(n_pa_)) {}

double rect_rect_penetration(const Rect& a, const Rect& b) {
  const Vec2 v = b.center() - a.center();
  const Vec2 axes[4] = {a.u1(), a.u2(), b.u1(), b.u2()};
  double depth = std::numeric_limits<double>::infinity();
  for (const Vec2& u : axes) {
    const double overlap = rect_support(a, u) + rect_support(b, u) - std::abs(v.dot(u));
    depth = std::min(depth, overlap);
  }
  return std::max(depth, 0.0);
}

bool rects_separated(const Rect& a, const Rect& b) {
  return rect_rect_penetration(a, b) <= kGeoEps;
}

double rect_point_distance(const Rect& d, Vec2 p) {
  const Vec2 v = p - d.center();
  const double lx = v.dot(d.u1());
  const double ly = v.dot(d.u2());
  const double dx = std::abs(lx) - 0.5 * d.w;
  const double dy = std::abs(ly) - 0.5 * d.h;
  if (dx <= 0.0 && dy <= 0.0) return 0.0;
  return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
}

double rect_circle_penetration(const Rect& d, const Circle& z) {
  const Vec2 v = z.center() - d.center();
  const double lx = v.dot(d.u1());
  const double ly = v.dot(d.u2());
  const double dx = std::abs(lx) - 0.5 * d.w;
  const double dy = std::abs(ly) - 0.5 * d.h;
  // Signed distance from the center to the rectangle boundary.
  double sd;
  if (dx > 0.0 || dy > 0.0)
    sd = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  else
    sd = std::max(dx, dy);
  return std::max(z.r - sd, 0.0);
}

bool rect_circle_separated(const Rect& d, const Circle& z) {
  return rect_circle_penetration(d, z) <= kGeoEps;
}

double circle_circle_penetration(const Circle& a, const Circle& b) {
  return std::max(a.r + b.r - (b.center() - a.center()).norm(), 0.0);
}

bool circles_separated(const Circle& a, const Circle& b) {
  return circle_circle_penetration(a, b) <= kGeoEps;
}

bool rect_circle_separated_discrete(const Rect& d, const Circle& z,
                                    const std::vector<double>& projected_angles_deg) {
  // Express the center offset in the rectangle frame; each projected angle
  // then tests the world axis obtained by rotating u_p with the rectangle.
  const Vec2 local = (z.center() - d.center()).rotated(-d.theta_deg);
  for (double tp : projected_angles_deg) {
    const double c = cos_deg(tp);
    const double s = sin_deg(tp);
    const double lhs = std::abs(local.x * c + local.y * s);
    const double rhs = z.r + 0.5 * d.w * std::abs(c) + 0.5 * d.h * std::abs(s);
    if (lhs >= rhs - kGeoEps) return true;
  }
  return false;
}

bool circles_separated_discrete(const Circle& a, const Circle& b,
                                const std::vector<double>& projected_angles_deg) {
  const Vec2 v = b.center() - a.center();
  for (double tp : projected_angles_deg) {
    const double lhs = std::abs(v.x * cos_deg(tp) + v.y * sin_deg(tp));
    if (lhs >= a.r + b.r - kGeoEps) return true;
  }
  return false;
}

bool rect_inside(const Rect& r, const DesignSpace& space) {
  for (const Vec2& c : r.corners()) {
    if (c.x < space.x_min - kGeoEps || c.x > space.x_max + kGeoEps) return false;
    if (c.y < space.y_min - kGeoEps || c.y > space.y_max + kGeoEps) return false;
  }
  return true;
}

bool circle_inside(const Circle& c, const DesignSpace& space) {
  return c.x >= space.x_min + c.r - kGeoEps && c.x <= space.x_max - c.r + kGeoEps &&
         c.y >= space.y_min + c.r - kGeoEps && c.y <= space.y_max - c.r + kGeoEps;
}

}  // namespace moto2d
