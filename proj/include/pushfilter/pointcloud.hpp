#pragma once

#include <string>
#include <vector>

#include "pushfilter/common.hpp"

namespace pushfilter {

// Point cloud in meters, with an optional per-point source-view index.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<int> view_ids;  // empty, or same length as points

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void append(const Vec3& p, int view_id = -1) {
    points.push_back(p);
    if (view_id >= 0) view_ids.push_back(view_id);
  }

  void merge(const PointCloud& other);
  Vec3 centroid() const;
  void bounds(Vec3& lo, Vec3& hi) const;

  // keeps at most one point per voxel of the given edge length
  PointCloud voxel_downsample(double voxel) const;
};

// ASCII format: one "x y z [view_id]" per line, '#' starts a comment.
PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);

// Hash-grid nearest neighbor index over a fixed set of points.
class GridNN {
 public:
  GridNN() = default;
  explicit GridNN(const std::vector<Vec3>& pts, double cell = 0.0);

  bool empty() const { return pts_.empty(); }
  size_t size() const { return pts_.size(); }

  // index of the nearest point and its squared distance
  int nearest(const Vec3& q, double* dist2 = nullptr) const;

 private:
  int64_t key(int ix, int iy, int iz) const;
  std::vector<Vec3> pts_;
  double cell_ = 0.05;
  Vec3 origin_ = Vec3::Zero();
  std::vector<std::pair<int64_t, int>> cells_;  // sorted (cell key, point index)
};

// Symmetric mean of nearest-neighbor distances (linear units):
// CD(A,B) = 0.5 * (mean_a min_b |a-b| + mean_b min_a |a-b|).
double chamfer_distance(const PointCloud& a, const PointCloud& b);

// Single-linkage Euclidean clustering; returns cluster index per point,
// clusters ordered by decreasing size.
std::vector<int> euclidean_cluster(const std::vector<Vec3>& pts, double radius,
                                   int* n_clusters = nullptr);

}  // namespace pushfilter
