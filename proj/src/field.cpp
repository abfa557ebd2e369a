#include "ci/field.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ci/parallel.hpp"

namespace ci {

PeriodicField::PeriodicField(int dim_domain, int dim_range, int resolution)
    : n_(dim_domain), k_(dim_range), r_(resolution) {
  if (n_ < 2 || n_ > kMaxDim) throw Error("field dimension out of range (2 <= n <= 4)");
  if (k_ < 1) throw Error("field range dimension must be >= 1");
  if (r_ < 8) throw Error("grid too coarse");
  nodes_ = 1;
  for (int a = 0; a < n_; ++a) nodes_ *= r_;
  std::int64_t s = 1;
  for (int a = n_ - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= r_;
  }
  values_.assign(static_cast<std::size_t>(nodes_) * k_, 0.0);
}

std::int64_t PeriodicField::flat_index(const Coord& c) const {
  std::int64_t idx = 0;
  for (int a = 0; a < n_; ++a) idx += static_cast<std::int64_t>(wrap(c[a])) * stride_[a];
  return idx;
}

Coord PeriodicField::coord_of(std::int64_t node) const {
  Coord c{};
  for (int a = 0; a < n_; ++a) {
    c[a] = static_cast<int>(node / stride_[a]);
    node %= stride_[a];
  }
  return c;
}

std::int64_t PeriodicField::neighbor(std::int64_t node, int axis, int shift) const {
  std::int64_t s = stride_[axis];
  int i = static_cast<int>((node / s) % r_);
  int j = wrap(i + shift);
  return node + static_cast<std::int64_t>(j - i) * s;
}

std::array<double, kMaxDim> PeriodicField::position(std::int64_t node) const {
  Coord c = coord_of(node);
  std::array<double, kMaxDim> x{};
  for (int a = 0; a < n_; ++a) x[a] = c[a] * spacing();
  return x;
}

bool PeriodicField::is_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double PeriodicField::sample(const std::array<double, kMaxDim>& x, int c) const {
  // Tensor-product periodic Catmull-Rom.
  double h = spacing();
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> t{};
  for (int a = 0; a < n_; ++a) {
    double u = x[a] / h;
    double fl = std::floor(u);
    base[a] = wrap(static_cast<int>(fl));
    t[a] = u - fl;
  }
  // Recursive evaluation over the 4^n stencil.
  auto w = [](double s, int j) {
    switch (j) {
      case 0: return 0.5 * (-s + 2 * s * s - s * s * s);
      case 1: return 0.5 * (2 - 5 * s * s + 3 * s * s * s);
      case 2: return 0.5 * (s + 4 * s * s - 3 * s * s * s);
      default: return 0.5 * (-s * s + s * s * s);
    }
  };
  std::array<int, kMaxDim> off{};
  double acc = 0.0;
  // Iterate the 4^n offsets with an odometer.
  int total = 1;
  for (int a = 0; a < n_; ++a) total *= 4;
  for (int it = 0; it < total; ++it) {
    int rem = it;
    double weight = 1.0;
    Coord cc{};
    for (int a = 0; a < n_; ++a) {
      off[a] = rem % 4;
      rem /= 4;
      weight *= w(t[a], off[a]);
      cc[a] = base[a] + off[a] - 1;
    }
    acc += weight * at(flat_index(cc), c);
  }
  return acc;
}

MetricField::MetricField(int dim, int resolution)
    : dim_(dim), data_(dim, sym_components(dim), resolution) {}

MetricField::MetricField(PeriodicField data) : dim_(data.dim_domain()), data_(std::move(data)) {
  if (data_.dim_range() != sym_components(dim_)) throw Error("metric field has wrong component count");
}

int MetricField::slot(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: row i contributes (n-i) entries.
  return i * n - i * (i - 1) / 2 + (j - i);
}

double MetricField::entry(std::int64_t node, int i, int j) const {
  return data_.at(node, slot(dim_, i, j));
}

void MetricField::set_entry(std::int64_t node, int i, int j, double v) {
  data_.at(node, slot(dim_, i, j)) = v;
}

void MetricField::node_matrix(std::int64_t node, double* out) const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) out[j * dim_ + i] = entry(node, i, j);
}

void MetricField::set_node_matrix(std::int64_t node, const double* in) {
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) set_entry(node, i, j, in[j * dim_ + i]);
}

std::array<double, 2> MetricField::eigen_range() const {
  const std::int64_t nn = node_count();
  const int n = dim_;
  double lo = 1e300, hi = -1e300;
#if defined(_OPENMP)
#pragma omp parallel
#endif
  {
    double tlo = 1e300, thi = -1e300;
    Eigen::MatrixXd m(n, n);
#if defined(_OPENMP)
#pragma omp for schedule(static)
#endif
    for (std::int64_t node = 0; node < nn; ++node) {
      node_matrix(node, m.data());
      if (n == 2) {
        double a = m(0, 0), b = m(0, 1), d = m(1, 1);
        double tr = a + d, disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4 * b * b));
        double l1 = 0.5 * (tr - disc), l2 = 0.5 * (tr + disc);
        tlo = std::min(tlo, l1);
        thi = std::max(thi, l2);
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        tlo = std::min(tlo, es.eigenvalues().minCoeff());
        thi = std::max(thi, es.eigenvalues().maxCoeff());
      }
    }
#if defined(_OPENMP)
#pragma omp critical
#endif
    {
      lo = std::min(lo, tlo);
      hi = std::max(hi, thi);
    }
  }
  return {lo, hi};
}

bool MetricField::is_elliptic(double gamma) const {
  auto [lo, hi] = eigen_range();
  return lo >= 1.0 / gamma && hi <= gamma;
}

static MetricField combine(const MetricField& a, const MetricField& b, double sb) {
  MetricField out = a;
  auto& v = out.field().values();
  const auto& w = b.field().values();
  if (v.size() != w.size()) throw Error("metric field shape mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += sb * w[i];
  return out;
}

MetricField operator+(const MetricField& a, const MetricField& b) { return combine(a, b, 1.0); }
MetricField operator-(const MetricField& a, const MetricField& b) { return combine(a, b, -1.0); }

MetricField scale(const MetricField& a, double s) {
  MetricField out = a;
  for (auto& v : out.field().values()) v *= s;
  return out;
}

}  // namespace ci
