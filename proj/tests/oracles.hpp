#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "waggle/geometry.hpp"

// Brute-force geometric oracles. They live in test code and must stay
// independent of the implementation paths they check.
namespace oracles {

using waggle::geom::Circle;
using waggle::geom::Vec2;

// O(n^3) minimal enclosing circle: try every circle defined by 2 or 3 points,
// keep the smallest one containing all.
inline Circle sec_oracle(const std::vector<Vec2>& pts) {
  using waggle::geom::cross;
  using waggle::geom::dist;
  const double slack = 1e-9;
  Circle best{{0, 0}, std::numeric_limits<double>::infinity()};
  auto consider = [&](const Circle& c) {
    for (const Vec2& p : pts)
      if (dist(c.center, p) > c.radius + slack) return;
    if (c.radius < best.radius) best = c;
  };
  if (pts.size() == 1) return {pts[0], 0.0};
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      consider({(pts[i] + pts[j]) * 0.5, 0.5 * dist(pts[i], pts[j])});
      for (size_t k = j + 1; k < pts.size(); ++k) {
        const Vec2 a = pts[i], b = pts[j], c = pts[k];
        const double d = 2.0 * cross(b - a, c - a);
        if (std::abs(d) < 1e-12) continue;
        const double a2 = a.norm_sq(), b2 = b.norm_sq(), c2 = c.norm_sq();
        const Vec2 center{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
        consider({center, dist(center, a)});
      }
    }
  return best;
}

// Distance from a site to the nearest edge of its Voronoi cell, by clipping a
// large box against every bisector half-plane and measuring the distance to
// the resulting polygon boundary.
inline double voronoi_cell_clearance_oracle(const Vec2& p, const std::vector<Vec2>& others) {
  using waggle::geom::dist;
  using waggle::geom::dot;
  const double big = 1e6;
  std::vector<Vec2> poly{{p.x - big, p.y - big},
                         {p.x + big, p.y - big},
                         {p.x + big, p.y + big},
                         {p.x - big, p.y + big}};
  for (const Vec2& q : others) {
    const Vec2 mid = (p + q) * 0.5;
    const Vec2 n = q - p;
    std::vector<Vec2> next;
    const auto inside = [&](const Vec2& x) { return dot(x - mid, n) <= 0.0; };
    for (size_t i = 0; i < poly.size(); ++i) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[(i + 1) % poly.size()];
      const bool ia = inside(a), ib = inside(b);
      if (ia) next.push_back(a);
      if (ia != ib) {
        const double da = dot(a - mid, n);
        const double db = dot(b - mid, n);
        next.push_back(a + (b - a) * (da / (da - db)));
      }
    }
    poly = std::move(next);
    if (poly.empty()) return 0.0;
  }
  double clearance = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const Vec2 ab = b - a;
    const double len2 = ab.norm_sq();
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    clearance = std::min(clearance, dist(p, a + ab * t));
  }
  return clearance;
}

inline std::vector<Vec2> random_points(std::mt19937& rng, int n, double span = 100.0,
                                       double min_sep = 1e-3) {
  std::uniform_real_distribution<double> u(-span, span);
  std::vector<Vec2> pts;
  while (static_cast<int>(pts.size()) < n) {
    Vec2 cand{u(rng), u(rng)};
    bool ok = true;
    for (const Vec2& p : pts)
      if (waggle::geom::dist(p, cand) < min_sep) ok = false;
    if (ok) pts.push_back(cand);
  }
  return pts;
}

// Random configuration usable by every protocol: separated robots, nobody
// near the SEC center, and pairwise distinct radius angles so the chirality
// naming has no ties.
inline std::vector<Vec2> random_configuration(std::mt19937& rng, int n, double span = 20.0,
                                              double min_sep = 2.0) {
  for (;;) {
    const auto pts = random_points(rng, n, span, min_sep);
    const Circle sec = waggle::geom::smallest_enclosing_circle(pts);
    bool ok = true;
    std::vector<double> angles;
    for (const Vec2& p : pts) {
      const Vec2 v = p - sec.center;
      if (v.norm() < 0.5) ok = false;
      if (!ok) break;
      angles.push_back(std::atan2(v.y, v.x));
    }
    if (!ok) continue;
    std::sort(angles.begin(), angles.end());
    for (size_t i = 1; i < angles.size() && ok; ++i)
      if (angles[i] - angles[i - 1] < 1e-4) ok = false;
    if (ok) return pts;
  }
}

}  // namespace oracles
