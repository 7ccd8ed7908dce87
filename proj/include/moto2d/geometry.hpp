#pragma once

#include <vector>

namespace moto2d {

// Absolute tolerance for geometric comparisons, in meters.
inline constexpr double kGeoEps = 1e-6;

double cos_deg(double deg);
double sin_deg(double deg);
// Reduce an angle to [0, 180) modulo the rectangle symmetry.
double normalize_angle_deg(double deg);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const;
  Vec2 rotated(double deg) const;
};

struct Rect {
  double w = 1.0;
  double h = 1.0;
  double x = 0.0;
  double y = 0.0;
  double theta_deg = 0.0;  // in [0, 180)

  Rect() = default;
  Rect(double w, double h, double x, double y, double theta_deg);

  Vec2 center() const { return {x, y}; }
  Vec2 u1() const { return {cos_deg(theta_deg), sin_deg(theta_deg)}; }
  Vec2 u2() const { return {-sin_deg(theta_deg), cos_deg(theta_deg)}; }
  std::vector<Vec2> corners() const;
  // Same rectangle rigidly rotated about the origin by gamma degrees.
  Rect rotated_about_origin(double gamma_deg) const;
};

struct Circle {
  double r = 1.0;
  double x = 0.0;
  double y = 0.0;
  double theta_p_deg = 0.0;  // projected angle, in [0, 180]

  Circle() = default;
  Circle(double r, double x, double y, double theta_p_deg = 0.0);

  Vec2 center() const { return {x, y}; }
  Circle rotated_about_origin(double gamma_deg) const;
};

struct DesignSpace {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;

  DesignSpace() = default;
  DesignSpace(double x_min, double x_max, double y_min, double y_max);
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

// theta_k = 180*k/N_a for rectangles, theta_kp = 180*kp/(N_pa-1) for circles.
struct AngleScheme {
  int n_a = 4;
  int n_pa = 3;
  std::vector<double> rect_angles_deg;
  std::vector<double> projected_angles_deg;

  AngleScheme() = default;
  AngleScheme(int n_a, int n_pa);
  // Index of the angle 90 degrees away from index k.
  int perp_index(int k) const { return (k + n_a / 2) % n_a; }
};

std::vector<double> discretize_angles(int n_a);
std::vector<double> discretize_projected_angles(int n_pa);

// Exact continuous-domain separation tests. Touching shapes count as
// separated (the SAT inequalities are non-strict).
bool rects_separated(const Rect& a, const Rect& b);
bool rect_circle_separated(const Rect& d, const Circle& z);
bool circles_separated(const Circle& a, const Circle& b);

// Distance from the circle center to the rectangle (0 when inside).
double rect_point_distance(const Rect& d, Vec2 p);
// Penetration depth of an overlapping pair (0 when separated): the largest
// projection overlap deficit across the four SAT axes.
double rect_rect_penetration(const Rect& a, const Rect& b);
double rect_circle_penetration(const Rect& d, const Circle& z);
double circle_circle_penetration(const Circle& a, const Circle& b);

// The discretized sufficient test of the placement model: true iff the
// rotated-frame projection inequality holds for some projected angle in the
// scheme. Implies exact separation, never the reverse.
bool rect_circle_separated_discrete(const Rect& d, const Circle& z,
                                    const std::vector<double>& projected_angles_deg);
bool circles_separated_discrete(const Circle& a, const Circle& b,
                                const std::vector<double>& projected_angles_deg);

bool rect_inside(const Rect& r, const DesignSpace& space);
bool circle_inside(const Circle& c, const DesignSpace& space);

}  // namespace moto2d
