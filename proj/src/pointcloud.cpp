#include "pushfilter/pointcloud.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pushfilter {

void PointCloud::merge(const PointCloud& other) {
  const bool keep_views = (view_ids.size() == points.size()) &&
                          (other.view_ids.size() == other.points.size());
  points.insert(points.end(), other.points.begin(), other.points.end());
  if (keep_views) {
    view_ids.insert(view_ids.end(), other.view_ids.begin(), other.view_ids.end());
  } else {
    view_ids.clear();
  }
}

Vec3 PointCloud::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : points) c += p;
  return points.empty() ? c : Vec3(c / double(points.size()));
}

void PointCloud::bounds(Vec3& lo, Vec3& hi) const {
  lo = Vec3::Constant(std::numeric_limits<double>::max());
  hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
}

PointCloud PointCloud::voxel_downsample(double voxel) const {
  PointCloud out;
  std::unordered_set<int64_t> seen;
  const bool has_views = view_ids.size() == points.size();
  for (size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    const int64_t ix = (int64_t)std::floor(p.x() / voxel);
    const int64_t iy = (int64_t)std::floor(p.y() / voxel);
    const int64_t iz = (int64_t)std::floor(p.z() / voxel);
    const int64_t k = (ix * 73856093LL) ^ (iy * 19349663LL) ^ (iz * 83492791LL);
    if (seen.insert(k).second) out.append(p, has_views ? view_ids[i] : -1);
  }
  return out;
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cloud file: " + path);
  PointCloud cloud;
  std::string line;
  while (std::getline(in, line)) {
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) continue;
    int vid = -1;
    ss >> vid;
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
      throw std::domain_error("non-finite coordinate in cloud file: " + path);
    cloud.append(Vec3(x, y, z), vid);
  }
  if (cloud.view_ids.size() != cloud.points.size()) cloud.view_ids.clear();
  return cloud;
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cloud file: " + path);
  out << "# x y z" << (cloud.view_ids.empty() ? "" : " view_id") << "\n";
  char buf[128];
  const bool has_views = cloud.view_ids.size() == cloud.points.size();
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (has_views)
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d\n", p.x(), p.y(), p.z(),
                    cloud.view_ids[i]);
    else
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out << buf;
  }
}

GridNN::GridNN(const std::vector<Vec3>& pts, double cell) : pts_(pts) {
  if (pts_.empty()) return;
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const auto& p : pts_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo;
  if (cell > 0) {
    cell_ = cell;
  } else {
    // aim for a few points per cell
    const double diag = (hi - lo).norm();
    cell_ = std::max(1e-6, diag / std::max(4.0, std::cbrt(double(pts_.size()))));
  }
  cells_.reserve(pts_.size());
  for (size_t i = 0; i < pts_.size(); ++i) {
    const Vec3 r = (pts_[i] - origin_) / cell_;
    cells_.emplace_back(key((int)std::floor(r.x()), (int)std::floor(r.y()),
                            (int)std::floor(r.z())),
                        (int)i);
  }
  std::sort(cells_.begin(), cells_.end());
}

int64_t GridNN::key(int ix, int iy, int iz) const {
  return ((int64_t)(ix + (1 << 20)) << 42) ^ ((int64_t)(iy + (1 << 20)) << 21) ^
         (int64_t)(iz + (1 << 20));
}

int GridNN::nearest(const Vec3& q, double* dist2) const {
  if (pts_.empty()) return -1;
  const Vec3 r = (q - origin_) / cell_;
  const int cx = (int)std::floor(r.x());
  const int cy = (int)std::floor(r.y());
  const int cz = (int)std::floor(r.z());

  int best = -1;
  double best2 = std::numeric_limits<double>::max();
  for (int ring = 0; ring <= 4096; ++ring) {
    for (int dx = -ring; dx <= ring; ++dx) {
      for (int dy = -ring; dy <= ring; ++dy) {
        for (int dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
          const int64_t k = key(cx + dx, cy + dy, cz + dz);
          auto it = std::lower_bound(cells_.begin(), cells_.end(),
                                     std::make_pair(k, -1));
          for (; it != cells_.end() && it->first == k; ++it) {
            const double d2 = (pts_[it->second] - q).squaredNorm();
            if (d2 < best2) {
              best2 = d2;
              best = it->second;
            }
          }
        }
      }
    }
    // cells in rings > ring hold points at distance >= ring*cell from q
    if (best >= 0) {
      const double safe = (double)ring * cell_;
      if (best2 <= safe * safe) break;
    }
  }
  if (dist2) *dist2 = best2;
  return best;
}

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw std::domain_error("chamfer_distance: empty cloud");
  GridNN na(a.points), nb(b.points);
  double sum_ab = 0.0, sum_ba = 0.0;
  for (const auto& p : a.points) {
    double d2;
    nb.nearest(p, &d2);
    sum_ab += std::sqrt(d2);
  }
  for (const auto& p : b.points) {
    double d2;
    na.nearest(p, &d2);
    sum_ba += std::sqrt(d2);
  }
  return 0.5 * (sum_ab / double(a.size()) + sum_ba / double(b.size()));
}

std::vector<int> euclidean_cluster(const std::vector<Vec3>& pts, double radius,
                                   int* n_clusters) {
  const int n = (int)pts.size();
  std::vector<int> label(n, -1);
  if (n == 0) {
    if (n_clusters) *n_clusters = 0;
    return label;
  }
  // grid hash with cell = radius so neighbors live in the 27 adjacent cells
  std::unordered_map<int64_t, std::vector<int>> grid;
  auto cell_key = [&](const Vec3& p) {
    const int64_t ix = (int64_t)std::floor(p.x() / radius);
    const int64_t iy = (int64_t)std::floor(p.y() / radius);
    const int64_t iz = (int64_t)std::floor(p.z() / radius);
    return (ix << 42) ^ (iy << 21) ^ iz;
  };
  for (int i = 0; i < n; ++i) grid[cell_key(pts[i])].push_back(i);

  const double r2 = radius * radius;
  int n_lab = 0;
  std::vector<int> stack;
  for (int seed = 0; seed < n; ++seed) {
    if (label[seed] >= 0) continue;
    label[seed] = n_lab;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const Vec3& p = pts[i];
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            const Vec3 q(p.x() + dx * radius, p.y() + dy * radius, p.z() + dz * radius);
            auto it = grid.find(cell_key(q));
            if (it == grid.end()) continue;
            for (int j : it->second) {
              if (label[j] >= 0) continue;
              if ((pts[j] - p).squaredNorm() <= r2) {
                label[j] = n_lab;
                stack.push_back(j);
              }
            }
          }
    }
    ++n_lab;
  }
  // relabel by decreasing cluster size
  std::vector<int> count(n_lab, 0);
  for (int l : label) count[l]++;
  std::vector<int> order(n_lab);
  for (int i = 0; i < n_lab; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return count[x] != count[y] ? count[x] > count[y] : x < y;
  });
  std::vector<int> remap(n_lab);
  for (int i = 0; i < n_lab; ++i) remap[order[i]] = i;
  for (int& l : label) l = remap[l];
  if (n_clusters) *n_clusters = n_lab;
  return label;
}

}  // namespace pushfilter
