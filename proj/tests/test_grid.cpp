#include <cmath>
#include <random>
#include <sstream>

#include "ci/grid_ops.hpp"
#include "ci/io.hpp"
#include "doctest.h"

using namespace ci;

namespace {

PeriodicField scalar_field(int R, double (*fn)(double, double)) {
  PeriodicField f(2, 1, R);
  for (std::int64_t node = 0; node < f.node_count(); ++node) {
    auto x = f.position(node);
    f.at(node, 0) = fn(x[0], x[1]);
  }
  return f;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(xs.size());
  for (int i = 0; i < n; ++i) {
    double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("diff of a constant vanishes") {
  PeriodicField f(2, 1, 32);
  for (auto& v : f.values()) v = 3.25;
  PeriodicField d = diff(f, 0, 1);
  CHECK(sup_norm(d) == 0.0);
}

TEST_CASE("diff matches the analytic derivative of sin(3x)") {
  auto f = scalar_field(256, [](double x, double) { return std::sin(3 * x); });
  PeriodicField d = diff(f, 0, 1);
  double err = 0.0;
  for (std::int64_t node = 0; node < f.node_count(); ++node) {
    auto x = f.position(node);
    err = std::max(err, std::abs(d.at(node, 0) - 3 * std::cos(3 * x[0])));
  }
  CHECK(err < 1e-6);

  PeriodicField dy = diff(f, 1, 1);
  CHECK(sup_norm(dy) < 1e-12);
}

TEST_CASE("diff commutes with whole-cell translation exactly") {
  auto f = scalar_field(64, [](double x, double y) { return std::sin(2 * x) * std::cos(y); });
  PeriodicField d = diff(f, 0, 1);
  PeriodicField g = PeriodicField::zeros_like(f);
  for (std::int64_t node = 0; node < f.node_count(); ++node) {
    Coord c = f.coord_of(node);
    g.at(node, 0) = f.at(f.flat_index({c[0] + 5, c[1] + 3}), 0);
  }
  PeriodicField dg = diff(g, 0, 1);
  double worst = 0.0;
  for (std::int64_t node = 0; node < f.node_count(); ++node) {
    Coord c = f.coord_of(node);
    worst = std::max(worst, std::abs(dg.at(node, 0) - d.at(d.flat_index({c[0] + 5, c[1] + 3}), 0)));
  }
  CHECK(worst == 0.0);
}

TEST_CASE("coarse grids are rejected") { CHECK_THROWS_AS(PeriodicField(2, 1, 4), Error); }

TEST_CASE("induced metric of the scaled product embedding is eps^2 Id") {
  const double eps = 0.37;
  PeriodicField u(2, 4, 128);
  for (std::int64_t node = 0; node < u.node_count(); ++node) {
    auto x = u.position(node);
    u.at(node, 0) = eps * std::cos(x[0]);
    u.at(node, 1) = eps * std::sin(x[0]);
    u.at(node, 2) = eps * std::cos(x[1]);
    u.at(node, 3) = eps * std::sin(x[1]);
  }
  MetricField g = induced_metric(u);
  double err = 0.0;
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    err = std::max(err, std::abs(g.entry(node, 0, 0) - eps * eps));
    err = std::max(err, std::abs(g.entry(node, 1, 1) - eps * eps));
    err = std::max(err, std::abs(g.entry(node, 0, 1)));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("induced metric of an affine chart stub gives A^T A at the flat point") {
  // u = A s(x), s = (sin x1, sin x2); at x = 0 the Jacobian is exactly A.
  const double A[3][2] = {{1.0, 0.2}, {-0.4, 1.1}, {0.3, 0.5}};
  PeriodicField u(2, 3, 128);
  for (std::int64_t node = 0; node < u.node_count(); ++node) {
    auto x = u.position(node);
    double s0 = std::sin(x[0]), s1 = std::sin(x[1]);
    for (int r = 0; r < 3; ++r) u.at(node, r) = A[r][0] * s0 + A[r][1] * s1;
  }
  MetricField g = induced_metric(u);
  double ata[2][2] = {{0, 0}, {0, 0}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 3; ++r) ata[i][j] += A[r][i] * A[r][j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(g.entry(0, i, j) == doctest::Approx(ata[i][j]).epsilon(1e-6));
}

TEST_CASE("induced metric of a constant map vanishes") {
  PeriodicField u(2, 4, 32);
  for (auto& v : u.values()) v = 1.5;
  MetricField g = induced_metric(u);
  CHECK(sup_norm(g.field()) == 0.0);
}

TEST_CASE("induced metric is positive semidefinite at every node") {
  PeriodicField u(2, 4, 48);
  for (std::int64_t node = 0; node < u.node_count(); ++node) {
    auto x = u.position(node);
    u.at(node, 0) = std::cos(x[0]) + 0.1 * std::sin(x[0] + 2 * x[1]);
    u.at(node, 1) = std::sin(x[0]) - 0.07 * std::cos(2 * x[0]);
    u.at(node, 2) = std::cos(x[1]) + 0.05 * std::sin(x[0] - x[1]);
    u.at(node, 3) = std::sin(x[1]) + 0.08 * std::cos(x[1]);
  }
  MetricField g = induced_metric(u);
  auto range = g.eigen_range();
  CHECK(range[0] >= -1e-12);
}

TEST_CASE("holder norms of a constant") {
  PeriodicField f(2, 1, 32);
  for (auto& v : f.values()) v = -2.5;
  HolderReport rep = holder_norms(f, {0.5, 1.0});
  CHECK(rep.sup_norm == doctest::Approx(2.5));
  CHECK(rep.seminorms[0] == 0.0);
  CHECK(rep.seminorms[1] == 0.0);
  CHECK(rep.sup_norm <= rep.grad_sup);
  CHECK(rep.grad_sup <= rep.hess_sup);
}

TEST_CASE("lipschitz seminorm of sine is close to one") {
  auto f = scalar_field(256, [](double x, double) { return std::sin(x); });
  double s = holder_seminorm(f, 1.0);
  CHECK(s == doctest::Approx(1.0).epsilon(0.05));
  CHECK(holder_seminorm(f, 1.0) == ref::holder_seminorm(f, 1.0));
}

TEST_CASE("interpolation inequality on sin(5x)") {
  auto f = scalar_field(256, [](double x, double) { return std::sin(5 * x); });
  HolderReport rep = holder_norms(f, {0.5});
  double lhs = rep.sup_norm + rep.seminorms[0];  // ||f||_{0,1/2}
  double rhs = 2.0 * std::sqrt(rep.sup_norm * rep.grad_sup);
  CHECK(lhs <= rhs);
}

TEST_CASE("empty field errors") {
  PeriodicField f;
  CHECK_THROWS(holder_norms(f, {}));
}

TEST_CASE("mollify keeps constants and the mean, and is a sup-contraction") {
  PeriodicField f = scalar_field(64, [](double x, double y) { return std::sin(x) + 0.3 * std::cos(2 * y); });
  PeriodicField c(2, 1, 64);
  for (auto& v : c.values()) v = 0.77;
  CHECK(sup_diff(mollify(c, 0.5), c) < 1e-12);

  PeriodicField g = mollify(f, 0.5);
  double mf = 0, mg = 0;
  for (std::int64_t i = 0; i < f.node_count(); ++i) {
    mf += f.at(i, 0);
    mg += g.at(i, 0);
  }
  CHECK(mf / f.node_count() == doctest::Approx(mg / g.node_count()).epsilon(1e-12));
  CHECK(sup_norm(g) <= sup_norm(f) + 1e-14);
}

TEST_CASE("mollify attenuates sin(k x) by the kernel fourier coefficient") {
  const int k = 4;
  const double ell = 0.5;
  auto f = scalar_field(256, [](double x, double) { return std::sin(4 * x); });
  PeriodicField g = mollify(f, ell);
  // Independent 1-D quadrature oracle over the sampled normalized kernel.
  auto w = mollifier_weights(ell, f.spacing());
  int half = (static_cast<int>(w.size()) - 1) / 2;
  double coeff = 0.0;
  for (int j = -half; j <= half; ++j) coeff += w[j + half] * std::cos(k * j * f.spacing());
  double measured = 0.0;
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    auto x = g.position(node);
    if (std::abs(std::sin(k * x[0])) > 0.99) measured = std::max(measured, std::abs(g.at(node, 0)));
  }
  CHECK(measured == doctest::Approx(coeff).epsilon(1e-6));
}

TEST_CASE("mollify error decays at second order for smooth fields") {
  auto f = scalar_field(512, [](double x, double y) { return std::sin(2 * x) * std::cos(3 * y); });
  std::vector<double> ells = {0.05, 0.1, 0.2, 0.4};
  std::vector<double> errs;
  for (double ell : ells) errs.push_back(sup_diff(mollify(f, ell), f));
  double slope = fit_slope(ells, errs);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.12));
}

TEST_CASE("mollify commutator estimate has slope 2*alpha for C^{1/2} data") {
  // f = |sin x|^{1/2} is Holder-1/2 at the zeros of sine; 2*alpha = 1.
  auto f = scalar_field(2048, [](double x, double) { return std::sqrt(std::abs(std::sin(x))); });
  std::vector<double> ells = {0.01, 0.02, 0.04, 0.08, 0.1};
  std::vector<double> comm;
  for (double ell : ells) {
    PeriodicField ff(2, 1, 2048);
    for (std::int64_t i = 0; i < f.node_count(); ++i) ff.at(i, 0) = f.at(i, 0) * f.at(i, 0);
    PeriodicField lhs = mollify(ff, ell);
    PeriodicField m = mollify(f, ell);
    double worst = 0.0;
    for (std::int64_t i = 0; i < f.node_count(); ++i)
      worst = std::max(worst, std::abs(lhs.at(i, 0) - m.at(i, 0) * m.at(i, 0)));
    comm.push_back(worst);
  }
  double slope = fit_slope(ells, comm);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("invalid mollification scales error") {
  auto f = scalar_field(32, [](double x, double) { return std::sin(x); });
  CHECK_THROWS_AS(mollify(f, 0.0), Error);
  CHECK_THROWS_AS(mollify(f, 2.0), Error);
}

TEST_CASE("parallel kernels agree bitwise with the serial reference") {
  auto f = scalar_field(96, [](double x, double y) { return std::sin(3 * x) * std::cos(2 * y) + 0.2 * std::sin(y); });
  CHECK(sup_diff(diff(f, 0, 1), ref::diff(f, 0, 1)) == 0.0);
  CHECK(sup_diff(diff(f, 1, 2), ref::diff(f, 1, 2)) == 0.0);
  CHECK(sup_diff(mollify(f, 0.3), ref::mollify(f, 0.3)) == 0.0);

  PeriodicField u(2, 4, 48);
  for (std::int64_t node = 0; node < u.node_count(); ++node) {
    auto x = u.position(node);
    u.at(node, 0) = std::cos(x[0]);
    u.at(node, 1) = std::sin(x[0]) + 0.1 * std::sin(x[1]);
    u.at(node, 2) = std::cos(x[1]);
    u.at(node, 3) = std::sin(x[1]);
  }
  CHECK(sup_diff(induced_metric(u).field(), ref::induced_metric(u).field()) == 0.0);
}

TEST_CASE("binary serialization round-trips bit-exactly") {
  auto f = scalar_field(32, [](double x, double y) { return std::sin(x + 0.3 * y); });
  std::stringstream ss;
  write_field(f, ss);
  PeriodicField g = read_field(ss);
  CHECK(g.resolution() == f.resolution());
  CHECK(sup_diff(f, g) == 0.0);
}

TEST_CASE("interpolation at grid nodes is exact") {
  auto f = scalar_field(32, [](double x, double y) { return std::sin(x) * std::cos(y); });
  auto x = f.position(17);
  CHECK(f.sample({x[0], x[1]}, 0) == doctest::Approx(f.at(17, 0)).epsilon(1e-14));
}
