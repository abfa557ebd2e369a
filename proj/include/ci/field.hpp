#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ci {

/// Error type carrying the module's loud failure messages.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kPeriod = 6.283185307179586476925286766559;  // 2*pi
constexpr int kMaxDim = 4;

using Coord = std::array<int, kMaxDim>;

/// Sampled function on a uniform periodic grid over the n-torus, vector
/// valued with k components per node. Storage is node-major: component c of
/// node (i0,...,i_{n-1}) sits at flat_index(coord)*k + c, axis 0 slowest.
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(int dim_domain, int dim_range, int resolution);

  int dim_domain() const { return n_; }
  int dim_range() const { return k_; }
  int resolution() const { return r_; }
  double period() const { return kPeriod; }
  double spacing() const { return kPeriod / r_; }
  std::int64_t node_count() const { return nodes_; }

  double& at(std::int64_t node, int c) { return values_[node * k_ + c]; }
  double at(std::int64_t node, int c) const { return values_[node * k_ + c]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::int64_t flat_index(const Coord& c) const;
  Coord coord_of(std::int64_t node) const;
  /// Wraps an unbounded per-axis index into [0, R).
  int wrap(int i) const {
    int m = i % r_;
    return m < 0 ? m + r_ : m;
  }
  /// Flat index of node shifted by whole cells along one axis.
  std::int64_t neighbor(std::int64_t node, int axis, int shift) const;
  /// Physical coordinates of a node in [0, 2pi)^n.
  std::array<double, kMaxDim> position(std::int64_t node) const;

  bool is_finite() const;
  /// Periodic cubic (Catmull-Rom) interpolation; exact at grid nodes.
  double sample(const std::array<double, kMaxDim>& x, int c) const;

  /// Pointwise map helpers.
  static PeriodicField zeros_like(const PeriodicField& f) { return PeriodicField(f.n_, f.k_, f.r_); }

 private:
  int n_ = 0, k_ = 0, r_ = 0;
  std::int64_t nodes_ = 0;
  std::array<std::int64_t, kMaxDim> stride_{};  // node strides per axis
  std::vector<double> values_;
};

/// Grid of symmetric n x n matrices stored by their n(n+1)/2 independent
/// entries (row-major upper triangle). Ellipticity bounds recorded by
/// measure_ellipticity().
class MetricField {
 public:
  MetricField() = default;
  MetricField(int dim, int resolution);
  explicit MetricField(PeriodicField data);

  static int sym_components(int n) { return n * (n + 1) / 2; }
  /// Component slot of entry (i,j), i<=j, row-major upper triangle.
  static int slot(int n, int i, int j);

  int dim() const { return dim_; }
  int resolution() const { return data_.resolution(); }
  std::int64_t node_count() const { return data_.node_count(); }

  PeriodicField& field() { return data_; }
  const PeriodicField& field() const { return data_; }

  double entry(std::int64_t node, int i, int j) const;
  void set_entry(std::int64_t node, int i, int j, double v);

  /// Copies node values into a dense column-major n x n buffer.
  void node_matrix(std::int64_t node, double* out) const;
  void set_node_matrix(std::int64_t node, const double* in);

  /// Min and max eigenvalue over all nodes (exact closed form for n=2,
  /// Eigen solver otherwise). Returns {lambda_min, lambda_max}.
  std::array<double, 2> eigen_range() const;
  /// True if eigenvalues at every node lie in [1/gamma, gamma].
  bool is_elliptic(double gamma) const;

 private:
  int dim_ = 0;
  PeriodicField data_;
};

MetricField operator+(const MetricField& a, const MetricField& b);
MetricField operator-(const MetricField& a, const MetricField& b);
MetricField scale(const MetricField& a, double s);

}  // namespace ci
