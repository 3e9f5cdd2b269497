#pragma once

#include <limits>
#include <vector>

#include "pushfilter/common.hpp"
#include "pushfilter/pointcloud.hpp"

namespace pushfilter {

// Superquadric with a tapering deformation along y and a planar pose.
// The implicit surface in the (taper-inverted) canonical frame is
//   F(x,y,z) = ((x/a_x)^(2/e2) + (y/a_y)^(2/e2))^(e2/e1) + (z/a_z)^(2/e1),
// F = 1 on the surface, < 1 inside. Tapering maps canonical points
// (x,y,z) -> (f(y)x, y, z) with f(y) = 1 + k1*(y/a_y) + k2*(y/a_y)^2, so
// k1 = k2 = 0 is the identity. The link frame sits at height a_z above the
// support plane; pose0 = (x0, y0, theta0) places it in the world.
struct SuperquadricParams {
  double eps1 = 1.0;
  double eps2 = 1.0;
  double a_x = 0.05;
  double a_y = 0.05;
  double a_z = 0.05;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Vec3 pose0 = Vec3::Zero();  // x0 [m], y0 [m], theta0 [rad]

  bool valid() const;
  void validate() const;  // throws std::invalid_argument
};

constexpr double kEpsMin = 0.1;
constexpr double kEpsMax = 2.0;

// taper factor and its y-derivative
double taper_factor(const SuperquadricParams& sq, double y);
Vec3 apply_taper(const SuperquadricParams& sq, const Vec3& p);
Vec3 invert_taper(const SuperquadricParams& sq, const Vec3& p);

// F at a point given in the superquadric (tapered local) frame
double implicit_value(const SuperquadricParams& sq, const Vec3& p);

Vec3 link_to_world(const SuperquadricParams& sq, const Vec3& p_local);
Vec3 world_to_link(const SuperquadricParams& sq, const Vec3& p_world);

// spherical-product surface map, eta in [-pi/2, pi/2], nu in [-pi, pi];
// returns a point in the tapered local frame
Vec3 surface_point(const SuperquadricParams& sq, double eta, double nu);

// area element |d p/d eta x d p/d nu|
double surface_jacobian(const SuperquadricParams& sq, double eta, double nu);

double surface_area(const SuperquadricParams& sq, int grid = 128);

// M points uniform per unit area (rejection on the area element), local frame
PointCloud sample_surface(const SuperquadricParams& sq, int count, uint64_t seed);
PointCloud sample_surface_world(const SuperquadricParams& sq, int count, uint64_t seed);

// Precomputed seeds for closest-point projection (shared across queries).
struct ProjectionSeeds {
  std::vector<double> eta, nu;
  std::vector<Vec3> pts;  // local frame
};
ProjectionSeeds make_projection_seeds(const SuperquadricParams& sq);

// Closest surface point to x (local frame): best of 64 seeds refined by
// coordinate descent on (eta, nu) to 1e-7 m.
Vec3 project_point(const SuperquadricParams& sq, const Vec3& x);
Vec3 project_point(const SuperquadricParams& sq, const ProjectionSeeds& seeds,
                   const Vec3& x, double* eta_out = nullptr, double* nu_out = nullptr,
                   double warm_eta = std::numeric_limits<double>::quiet_NaN(),
                   double warm_nu = std::numeric_limits<double>::quiet_NaN());

// Radial (Solina) distance from x (local frame) to the surface; cheap smooth
// surrogate of the Euclidean distance used inside optimization loops.
double radial_distance(const SuperquadricParams& sq, const Vec3& x);

// --- planar footprint (cross-section at z = 0 of the local frame) ---

// boundary point in the link frame for parameter nu
Vec2 footprint_point(const SuperquadricParams& sq, double nu);
// unit inward normal at the boundary point for parameter nu
Vec2 footprint_normal(const SuperquadricParams& sq, double nu);
// 2D implicit value of the footprint (<= 1 inside)
double footprint_value(const SuperquadricParams& sq, const Vec2& p);
// approximately arc-length-uniform boundary samples (nu values)
std::vector<double> footprint_arclength_params(const SuperquadricParams& sq, int count);
// through-width of the footprint along the inward normal at nu
double footprint_chord_width(const SuperquadricParams& sq, double nu);
// largest footprint radius from the link origin
double footprint_radius(const SuperquadricParams& sq);

}  // namespace pushfilter
