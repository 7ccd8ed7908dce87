#pragma once

// Reference geometry predicates for validating the SAT implementations.
// Everything here is deliberately built from different primitives than the
// library code: polygon clipping, point sampling, and edge distances.

#include <vector>

#include "moto2d/geometry.hpp"

namespace moto2d::oracle {

// Area of the intersection of two convex polygons (Sutherland-Hodgman clip
// followed by the shoelace formula). Zero for disjoint or touching shapes.
double convex_overlap_area(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);

// True when p lies inside the convex polygon or within tol of its boundary.
bool point_in_convex(const std::vector<Vec2>& poly, Vec2 p, double tol);

// Sample the interior of rectangle a on a regular grid with the given step
// and report whether any sample lands strictly inside rectangle b.
bool rects_share_point_sampling(const Rect& a, const Rect& b, double step);

double point_segment_distance(Vec2 a, Vec2 b, Vec2 p);

// Smallest distance between the boundaries of two disjoint convex polygons.
double polygon_gap(const std::vector<Vec2>& p, const std::vector<Vec2>& q);

// Distance from p to the rectangle via per-edge segment distances and an
// explicit point-in-polygon test (no clamping formula).
double rect_point_distance_by_edges(const Rect& r, Vec2 p);

}  // namespace moto2d::oracle
