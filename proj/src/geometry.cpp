#include "waggle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace waggle::geom {

double Vec2::norm() const { return std::hypot(x, y); }

bool Vec2::finite() const { return std::isfinite(x) && std::isfinite(y); }

Vec2 Vec2::normalized() const {
  const double n = norm();
  if (n <= kEps) throw std::domain_error("cannot normalize a (near-)zero vector");
  return {x / n, y / n};
}

Vec2 Vec2::rotated_cw(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {x * c + y * s, -x * s + y * c};
}

bool almost_equal(const Vec2& a, const Vec2& b, double eps) { return dist(a, b) <= eps; }

Granular::Granular(Vec2 center_, double radius_, int slice_count_, Vec2 zero_direction_)
    : center(center_), radius(radius_), slice_count(slice_count_),
      zero_direction(zero_direction_.normalized()) {
  if (!(radius > 0.0)) throw std::domain_error("granular radius must be positive");
  if (slice_count <= 0) throw std::domain_error("granular slice count must be positive");
}

double granular_radius(const Vec2& p, const std::vector<Vec2>& others) {
  if (others.empty()) throw std::domain_error("granular_radius: no other robots");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& q : others) best = std::min(best, dist(p, q));
  if (best <= kEps) throw std::domain_error("granular_radius: duplicate point at p");
  return 0.5 * best;
}

namespace {

Circle circle_from_two(const Vec2& a, const Vec2& b) {
  const Vec2 c = (a + b) * 0.5;
  return {c, 0.5 * dist(a, b)};
}

// Circumcircle; falls back to an enclosing two-point circle when (nearly)
// collinear, which is also the minimal circle in that case.
Circle circle_from_three(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d = 2.0 * cross(b - a, c - a);
  const double scale = std::max({a.norm(), b.norm(), c.norm(), 1.0});
  if (std::abs(d) <= 1e-14 * scale * scale) {
    Circle best = circle_from_two(a, b);
    for (const Circle& cand : {circle_from_two(a, c), circle_from_two(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const double a2 = a.norm_sq(), b2 = b.norm_sq(), c2 = c.norm_sq();
  const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
  const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
  const Vec2 center{ux, uy};
  const double r = std::max({dist(center, a), dist(center, b), dist(center, c)});
  return {center, r};
}

Circle trivial_circle(const std::vector<Vec2>& boundary) {
  switch (boundary.size()) {
    case 0: return {Vec2{0.0, 0.0}, 0.0};
    case 1: return {boundary[0], 0.0};
    case 2: return circle_from_two(boundary[0], boundary[1]);
    default: {
      // Prefer a two-point circle when one already covers the third point.
      for (int i = 0; i < 3; ++i) {
        const Circle c = circle_from_two(boundary[i], boundary[(i + 1) % 3]);
        if (c.contains(boundary[(i + 2) % 3])) return c;
      }
      return circle_from_three(boundary[0], boundary[1], boundary[2]);
    }
  }
}

Circle welzl(std::vector<Vec2>& pts, size_t end, std::vector<Vec2>& boundary) {
  if (end == 0 || boundary.size() == 3) return trivial_circle(boundary);
  const Vec2 p = pts[end - 1];
  Circle c = welzl(pts, end - 1, boundary);
  if (c.contains(p)) return c;
  boundary.push_back(p);
  c = welzl(pts, end - 1, boundary);
  boundary.pop_back();
  return c;
}

}  // namespace

Circle smallest_enclosing_circle(const std::vector<Vec2>& points) {
  if (points.empty()) throw std::domain_error("smallest_enclosing_circle: empty input");
  for (const Vec2& p : points)
    if (!p.finite()) throw std::domain_error("smallest_enclosing_circle: non-finite point");
  std::vector<Vec2> pts = points;
  // Deterministic Fisher-Yates shuffle; std::shuffle is not pinned across
  // standard library implementations.
  std::uint64_t state = 0x9e3779b97f4a7c15ull ^ (0x2545f4914f6cdd1dull * pts.size());
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  };
  for (size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[next() % i]);
  std::vector<Vec2> boundary;
  return welzl(pts, pts.size(), boundary);
}

double clockwise_angle(const Vec2& reference, const Vec2& target) {
  const Vec2 u = reference.normalized();
  const Vec2 v = target.normalized();
  const double ccw = std::atan2(cross(u, v), dot(u, v));
  double cw = ccw <= 0.0 ? -ccw : 2.0 * kPi - ccw;
  if (cw >= 2.0 * kPi - kEps) cw = 0.0;  // the horizon ray itself sorts first
  return cw;
}

Vec2 slice_direction(const Granular& g, int label, Side side) {
  if (label < 0 || label >= g.slice_count)
    throw std::domain_error("slice_direction: label " + std::to_string(label) +
                            " out of range [0, " + std::to_string(g.slice_count) + ")");
  const Vec2 ray = g.zero_direction.rotated_cw(label * kPi / g.slice_count);
  return side == Side::Zero ? ray : -ray;
}

std::optional<SliceClass> classify_displacement(const Granular& g, const Vec2& from,
                                                const Vec2& to) {
  const Vec2 delta = to - from;
  if (delta.norm() <= kEps) return std::nullopt;
  if (dist(to, g.center) <= kEps) return std::nullopt;  // return-to-center move
  const double step = kPi / g.slice_count;
  const double angle = clockwise_angle(g.zero_direction, delta);
  long idx = std::lround(angle / step);
  const double deviation = std::abs(angle - static_cast<double>(idx) * step);
  idx %= 2 * g.slice_count;
  SliceClass out;
  out.label = static_cast<int>(idx % g.slice_count);
  out.side = idx < g.slice_count ? Side::Zero : Side::One;
  out.deviation = deviation;
  return out;
}

namespace {

RelativeNaming naming_from_order(std::vector<int> order, int observer) {
  RelativeNaming naming;
  naming.observer = observer;
  naming.by_label = std::move(order);
  naming.labels.assign(naming.by_label.size(), -1);
  for (size_t k = 0; k < naming.by_label.size(); ++k)
    naming.labels[static_cast<size_t>(naming.by_label[k])] = static_cast<int>(k);
  return naming;
}

}  // namespace

RelativeNaming relative_naming_sod(const std::vector<Vec2>& positions, int observer) {
  const size_t n = positions.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (almost_equal(positions[i], positions[j]))
        throw std::domain_error("relative_naming_sod: duplicate positions " +
                                std::to_string(i) + " and " + std::to_string(j));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2& pa = positions[static_cast<size_t>(a)];
    const Vec2& pb = positions[static_cast<size_t>(b)];
    if (pa.x != pb.x) return pa.x < pb.x;
    return pa.y < pb.y;
  });
  return naming_from_order(std::move(order), observer);
}

RelativeNaming relative_naming_chirality(const std::vector<Vec2>& positions, int observer,
                                         const Circle& sec) {
  const size_t n = positions.size();
  if (observer < 0 || static_cast<size_t>(observer) >= n)
    throw std::domain_error("relative_naming_chirality: observer index out of range");
  const Vec2 horizon = positions[static_cast<size_t>(observer)] - sec.center;
  if (horizon.norm() <= kEps)
    throw std::domain_error("relative_naming_chirality: observer at the SEC center");
  struct Key {
    double angle;
    double radius;
  };
  std::vector<Key> keys(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2 v = positions[i] - sec.center;
    if (v.norm() <= kEps)
      throw std::domain_error("relative_naming_chirality: robot " + std::to_string(i) +
                              " at the SEC center");
    keys[i] = {clockwise_angle(horizon, v), v.norm()};
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Angles within kEps are the "same radius" case and fall through to the
  // distance-from-center tie-break. Inputs with distinct robots closer than
  // kEps in both keys are rejected as duplicates.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Key& ka = keys[static_cast<size_t>(a)];
    const Key& kb = keys[static_cast<size_t>(b)];
    if (std::abs(ka.angle - kb.angle) > kEps) return ka.angle < kb.angle;
    return ka.radius < kb.radius;
  });
  for (size_t k = 1; k < n; ++k) {
    const Key& ka = keys[static_cast<size_t>(order[k - 1])];
    const Key& kb = keys[static_cast<size_t>(order[k])];
    if (std::abs(ka.angle - kb.angle) <= kEps && std::abs(ka.radius - kb.radius) <= kEps)
      throw std::domain_error("relative_naming_chirality: coincident robots");
  }
  return naming_from_order(std::move(order), observer);
}

}  // namespace waggle::geom
