#pragma once

#include <optional>
#include <vector>

namespace waggle::geom {

// Tolerance used for point/angle comparisons throughout the library.
inline constexpr double kEps = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }

  double norm_sq() const { return x * x + y * y; }
  double norm() const;
  bool finite() const;

  // Unit vector in the same direction; throws std::domain_error on (near) zero.
  Vec2 normalized() const;

  // Quarter turn clockwise under the shared handedness: (0,1) -> (1,0).
  Vec2 perp_cw() const { return {y, -x}; }

  // Rotation by `angle` radians in the clockwise sense.
  Vec2 rotated_cw(double angle) const;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

bool almost_equal(const Vec2& a, const Vec2& b, double eps = kEps);

struct Circle {
  Vec2 center;
  double radius = 0.0;

  bool contains(const Vec2& p, double eps = kEps) const {
    return dist(center, p) <= radius + eps;
  }
};

enum class Side { Zero, One };

// A robot's private movement arena: the largest disc centered at its start
// position that stays inside its Voronoi cell, cut by `slice_count` diameters
// at equal angles. Diameter 0 points along `zero_direction`.
struct Granular {
  Vec2 center;
  double radius = 0.0;
  int slice_count = 0;
  Vec2 zero_direction{0.0, 1.0};

  Granular() = default;
  Granular(Vec2 center_, double radius_, int slice_count_, Vec2 zero_direction_);
};

struct SliceClass {
  int label = 0;
  Side side = Side::Zero;
  double deviation = 0.0;  // angular distance to the matched diameter ray
};

// Deterministic bijection robot index -> label in {0..n-1}.
struct RelativeNaming {
  int observer = -1;
  std::vector<int> labels;       // labels[i] = label of robot i
  std::vector<int> by_label;     // by_label[k] = robot with label k

  int label_of(int robot) const { return labels.at(static_cast<size_t>(robot)); }
  int robot_with(int label) const { return by_label.at(static_cast<size_t>(label)); }
};

// Half the distance to the nearest other point. This equals the radius of the
// largest disc centered at p and inscribed in p's Voronoi cell: the nearest
// cell edge lies on the bisector to the nearest neighbor, at half that
// distance. The equivalence is checked against a half-plane oracle in tests.
double granular_radius(const Vec2& p, const std::vector<Vec2>& others);

// Unique minimal circle containing all points (Welzl's algorithm with a
// deterministic shuffle). Collinear input degenerates to the diametral circle
// of the extreme pair.
Circle smallest_enclosing_circle(const std::vector<Vec2>& points);

// Angle in [0, 2*pi) swept when rotating `reference` clockwise onto `target`.
double clockwise_angle(const Vec2& reference, const Vec2& target);

// Unit vector of the diameter ray `label` on side `side`. Side::Zero is the
// ray at clockwise angle label*pi/slice_count from zero_direction; Side::One
// is its negation.
Vec2 slice_direction(const Granular& g, int label, Side side);

// Inverse of slice_direction: classify the displacement from -> to against
// the granular's diameter rays. Returns nullopt for no movement or for a
// return-to-center move. The 2*slice_count classification sectors tile the
// circle, so any real displacement classifies (deviation <= pi/(2*slice_count)).
std::optional<SliceClass> classify_displacement(const Granular& g, const Vec2& from,
                                                const Vec2& to);

// Total order shared by robots that agree on axis orientations: sort by x
// ascending, ties by y ascending. Invariant under per-observer translation
// and positive uniform scaling.
RelativeNaming relative_naming_sod(const std::vector<Vec2>& positions, int observer = -1);

// Naming for robots with chirality only. Primary key: clockwise angle of the
// robot's SEC radius from the observer's horizon ray (SEC center -> observer),
// angle 0 first. Secondary key: distance from the SEC center, ascending.
RelativeNaming relative_naming_chirality(const std::vector<Vec2>& positions, int observer,
                                         const Circle& sec);

}  // namespace waggle::geom
