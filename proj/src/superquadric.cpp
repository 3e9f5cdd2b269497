#include "pushfilter/superquadric.hpp"

#include <algorithm>

namespace pushfilter {

namespace {

// sign-preserving power
inline double spow(double t, double e) {
  if (t > 0) return std::pow(t, e);
  if (t < 0) return -std::pow(-t, e);
  return 0.0;
}

inline void check_finite(const Vec3& p) {
  if (!p.allFinite()) throw std::domain_error("non-finite point");
}

}  // namespace

bool SuperquadricParams::valid() const {
  return eps1 >= kEpsMin && eps1 <= kEpsMax && eps2 >= kEpsMin && eps2 <= kEpsMax &&
         a_x > 0 && a_y > 0 && a_z > 0 && kappa1 >= -1.0 && kappa1 <= 1.0 &&
         kappa2 >= 0.0 && kappa2 <= 1.0 && pose0.allFinite();
}

void SuperquadricParams::validate() const {
  if (!valid()) throw std::invalid_argument("invalid superquadric parameters");
}

double taper_factor(const SuperquadricParams& sq, double y) {
  const double u = y / sq.a_y;
  return 1.0 + sq.kappa1 * u + sq.kappa2 * u * u;
}

Vec3 apply_taper(const SuperquadricParams& sq, const Vec3& p) {
  check_finite(p);
  const double f = taper_factor(sq, p.y());
  if (f <= 0) throw std::domain_error("singular taper factor");
  return Vec3(f * p.x(), p.y(), p.z());
}

Vec3 invert_taper(const SuperquadricParams& sq, const Vec3& p) {
  check_finite(p);
  const double f = taper_factor(sq, p.y());
  if (f <= 0) throw std::domain_error("singular taper factor");
  return Vec3(p.x() / f, p.y(), p.z());
}

double implicit_value(const SuperquadricParams& sq, const Vec3& p) {
  check_finite(p);
  const Vec3 q = invert_taper(sq, p);
  const double tx = std::pow(std::abs(q.x() / sq.a_x), 2.0 / sq.eps2);
  const double ty = std::pow(std::abs(q.y() / sq.a_y), 2.0 / sq.eps2);
  const double tz = std::pow(std::abs(q.z() / sq.a_z), 2.0 / sq.eps1);
  return std::pow(tx + ty, sq.eps2 / sq.eps1) + tz;
}

Vec3 link_to_world(const SuperquadricParams& sq, const Vec3& p_local) {
  const Vec2 xy = rot2(sq.pose0.z()) * p_local.head<2>();
  return Vec3(xy.x() + sq.pose0.x(), xy.y() + sq.pose0.y(), p_local.z() + sq.a_z);
}

Vec3 world_to_link(const SuperquadricParams& sq, const Vec3& p_world) {
  const Vec2 xy = rot2(-sq.pose0.z()) *
                  Vec2(p_world.x() - sq.pose0.x(), p_world.y() - sq.pose0.y());
  return Vec3(xy.x(), xy.y(), p_world.z() - sq.a_z);
}

Vec3 surface_point(const SuperquadricParams& sq, double eta, double nu) {
  const double ce = std::cos(eta), se = std::sin(eta);
  const double cn = std::cos(nu), sn = std::sin(nu);
  const double ce1 = spow(ce, sq.eps1);
  Vec3 canon(sq.a_x * ce1 * spow(cn, sq.eps2), sq.a_y * ce1 * spow(sn, sq.eps2),
             sq.a_z * spow(se, sq.eps1));
  const double f = taper_factor(sq, canon.y());
  canon.x() *= std::max(f, 1e-12);
  return canon;
}

double surface_jacobian(const SuperquadricParams& sq, double eta, double nu) {
  // central differences in parameter space; the map is smooth away from the
  // coordinate poles, which quadrature points avoid
  const double h = 1e-5;
  const Vec3 de = (surface_point(sq, eta + h, nu) - surface_point(sq, eta - h, nu)) /
                  (2.0 * h);
  const Vec3 dn = (surface_point(sq, eta, nu + h) - surface_point(sq, eta, nu - h)) /
                  (2.0 * h);
  return de.cross(dn).norm();
}

double surface_area(const SuperquadricParams& sq, int grid) {
  const double deta = M_PI / grid;
  const double dnu = 2.0 * M_PI / grid;
  double area = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double eta = -M_PI / 2 + (i + 0.5) * deta;
    for (int j = 0; j < grid; ++j) {
      const double nu = -M_PI + (j + 0.5) * dnu;
      area += surface_jacobian(sq, eta, nu);
    }
  }
  return area * deta * dnu;
}

PointCloud sample_surface(const SuperquadricParams& sq, int count, uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_surface: count must be >= 1");
  // rejection sampling against the area element
  const int g = 24;
  double jmax = 0.0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      jmax = std::max(jmax, surface_jacobian(sq, -M_PI / 2 + (i + 0.5) * M_PI / g,
                                             -M_PI + (j + 0.5) * 2.0 * M_PI / g));
  jmax *= 1.3;

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(count);
  int guard = 0;
  while ((int)cloud.points.size() < count) {
    const double eta = rng.uniform(-M_PI / 2, M_PI / 2);
    const double nu = rng.uniform(-M_PI, M_PI);
    const double j = surface_jacobian(sq, eta, nu);
    if (j > jmax) jmax = j;  // safety: adapt if the grid estimate was low
    if (rng.uniform() * jmax <= j) cloud.points.push_back(surface_point(sq, eta, nu));
    if (++guard > 1000 * count + 100000) break;  // pathological parameters
  }
  while ((int)cloud.points.size() < count)
    cloud.points.push_back(surface_point(sq, 0.0, 0.0));
  return cloud;
}

PointCloud sample_surface_world(const SuperquadricParams& sq, int count, uint64_t seed) {
  PointCloud local = sample_surface(sq, count, seed);
  for (auto& p : local.points) p = link_to_world(sq, p);
  return local;
}

ProjectionSeeds make_projection_seeds(const SuperquadricParams& sq) {
  ProjectionSeeds s;
  const int g = 8;  // 64 seeds
  s.eta.reserve(g * g);
  s.nu.reserve(g * g);
  s.pts.reserve(g * g);
  for (int i = 0; i < g; ++i) {
    const double eta = -M_PI / 2 + (i + 0.5) * M_PI / g;
    for (int j = 0; j < g; ++j) {
      const double nu = -M_PI + (j + 0.5) * 2.0 * M_PI / g;
      s.eta.push_back(eta);
      s.nu.push_back(nu);
      s.pts.push_back(surface_point(sq, eta, nu));
    }
  }
  return s;
}

namespace {

// one coordinate-descent pass over (eta, nu); returns new squared distance
double descend(const SuperquadricParams& sq, const Vec3& x, double& eta, double& nu,
               double step_eta, double step_nu) {
  double best = (surface_point(sq, eta, nu) - x).squaredNorm();
  for (int dim = 0; dim < 2; ++dim) {
    double& v = dim == 0 ? eta : nu;
    double step = dim == 0 ? step_eta : step_nu;
    while (step > 1e-9) {
      const double v0 = v;
      for (const double cand : {v0 - step, v0 + step}) {
        double c = cand;
        if (dim == 0) c = clampd(c, -M_PI / 2, M_PI / 2);
        const double vv = v;
        v = c;
        const double d = (surface_point(sq, eta, nu) - x).squaredNorm();
        if (d < best - 1e-18) {
          best = d;
        } else {
          v = vv;
        }
      }
      if (v == v0) step *= 0.35;
    }
  }
  return best;
}

}  // namespace

Vec3 project_point(const SuperquadricParams& sq, const ProjectionSeeds& seeds,
                   const Vec3& x, double* eta_out, double* nu_out, double warm_eta,
                   double warm_nu) {
  check_finite(x);
  double eta, nu;
  if (std::isfinite(warm_eta) && std::isfinite(warm_nu)) {
    eta = warm_eta;
    nu = warm_nu;
  } else {
    int best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (size_t i = 0; i < seeds.pts.size(); ++i) {
      const double d = (seeds.pts[i] - x).squaredNorm();
      if (d < best_d - 1e-12) {
        best_d = d;
        best = (int)i;
      }
      // ties resolve to the lowest parameter-angle seed, which is the first hit
    }
    eta = seeds.eta[best];
    nu = seeds.nu[best];
  }
  double prev = std::numeric_limits<double>::max();
  for (int round = 0; round < 12; ++round) {
    const double d = descend(sq, x, eta, nu, 0.25, 0.45);
    if (prev - d < 1e-14) break;  // |delta point| ~ 1e-7 m
    prev = d;
  }
  if (eta_out) *eta_out = eta;
  if (nu_out) *nu_out = nu;
  return surface_point(sq, eta, nu);
}

Vec3 project_point(const SuperquadricParams& sq, const Vec3& x) {
  const ProjectionSeeds seeds = make_projection_seeds(sq);
  return project_point(sq, seeds, x);
}

double radial_distance(const SuperquadricParams& sq, const Vec3& x) {
  const double f = taper_factor(sq, x.y());
  if (f <= 1e-9) return x.norm();  // outside the taper's valid range
  const Vec3 q(x.x() / f, x.y(), x.z());
  const double tx = std::pow(std::abs(q.x() / sq.a_x), 2.0 / sq.eps2);
  const double ty = std::pow(std::abs(q.y() / sq.a_y), 2.0 / sq.eps2);
  const double tz = std::pow(std::abs(q.z() / sq.a_z), 2.0 / sq.eps1);
  const double F = std::pow(tx + ty, sq.eps2 / sq.eps1) + tz;
  if (F <= 0) return x.norm();
  // ray from the origin hits the surface at scale F^(-eps1/2)
  return x.norm() * std::abs(1.0 - std::pow(F, -sq.eps1 / 2.0));
}

Vec2 footprint_point(const SuperquadricParams& sq, double nu) {
  const double cx = sq.a_x * spow(std::cos(nu), sq.eps2);
  const double cy = sq.a_y * spow(std::sin(nu), sq.eps2);
  return Vec2(cx * std::max(taper_factor(sq, cy), 1e-12), cy);
}

double footprint_value(const SuperquadricParams& sq, const Vec2& p) {
  const double f = std::max(taper_factor(sq, p.y()), 1e-12);
  const double tx = std::pow(std::abs(p.x() / f / sq.a_x), 2.0 / sq.eps2);
  const double ty = std::pow(std::abs(p.y() / sq.a_y), 2.0 / sq.eps2);
  return tx + ty;
}

Vec2 footprint_normal(const SuperquadricParams& sq, double nu) {
  const double h = 1e-6;
  const Vec2 t = (footprint_point(sq, nu + h) - footprint_point(sq, nu - h)) / (2 * h);
  Vec2 n = -perp(t);
  const double len = n.norm();
  if (len < 1e-14) return Vec2(-1, 0);
  n /= len;
  // orient inward: stepping inward must decrease the implicit value
  const Vec2 p = footprint_point(sq, nu);
  const double step = 1e-4 * std::min(sq.a_x, sq.a_y);
  if (footprint_value(sq, p + step * n) > footprint_value(sq, p - step * n)) n = -n;
  return n;
}

std::vector<double> footprint_arclength_params(const SuperquadricParams& sq, int count) {
  // accumulate arc length over a dense polyline, then invert
  const int dense = 720;
  std::vector<double> cum(dense + 1, 0.0);
  Vec2 prev = footprint_point(sq, -M_PI);
  for (int i = 1; i <= dense; ++i) {
    const double nu = -M_PI + 2.0 * M_PI * i / dense;
    const Vec2 p = footprint_point(sq, nu);
    cum[i] = cum[i - 1] + (p - prev).norm();
    prev = p;
  }
  std::vector<double> out(count);
  const double total = cum[dense];
  for (int k = 0; k < count; ++k) {
    const double target = total * (k + 0.5) / count;
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const int i = std::max<int>(1, (int)(it - cum.begin()));
    const double f = (target - cum[i - 1]) / std::max(cum[i] - cum[i - 1], 1e-12);
    out[k] = -M_PI + 2.0 * M_PI * (i - 1 + f) / dense;
  }
  return out;
}

double footprint_chord_width(const SuperquadricParams& sq, double nu) {
  const Vec2 p = footprint_point(sq, nu);
  const Vec2 n = footprint_normal(sq, nu);
  // march along the inward normal until outside again
  const double limit = 4.0 * std::max(sq.a_x, sq.a_y) * 2.0;
  const double step = 1e-3 * std::max(sq.a_x, sq.a_y);
  double t = step;
  while (t < limit && footprint_value(sq, p + t * n) <= 1.0) t += step;
  return t;
}

double footprint_radius(const SuperquadricParams& sq) {
  double r = 0.0;
  for (int i = 0; i < 256; ++i)
    r = std::max(r, footprint_point(sq, -M_PI + 2.0 * M_PI * i / 256).norm());
  return r;
}

}  // namespace pushfilter
