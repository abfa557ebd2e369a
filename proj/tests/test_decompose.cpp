#include <cmath>
#include <random>

#include "ci/decompose.hpp"
#include "ci/grid_ops.hpp"
#include "doctest.h"

using namespace ci;

namespace {

std::vector<double> identity_matrix(int n) {
  std::vector<double> p(n * n, 0.0);
  for (int i = 0; i < n; ++i) p[i * n + i] = 1.0;
  return p;
}

MetricField constant_metric(int n, int R, const std::vector<double>& m) {
  MetricField P(n, R);
  for (std::int64_t node = 0; node < P.node_count(); ++node) P.set_node_matrix(node, m.data());
  return P;
}

}  // namespace

TEST_CASE("nash basis reproduces the worked n=2 coefficients") {
  NashBasis basis(2, identity_matrix(2));
  double id[4] = {1, 0, 0, 1};
  double c[3];
  basis.coefficients(id, c);
  CHECK(std::abs(c[0] - 1.0) < 1e-12);
  CHECK(std::abs(c[1] - 1.0) < 1e-12);
  CHECK(std::abs(c[2] - 0.0) < 1e-12);

  double p[4] = {1, 0.2, 0.2, 1};
  basis.coefficients(p, c);
  CHECK(std::abs(c[0] - 0.8) < 1e-12);
  CHECK(std::abs(c[1] - 0.8) < 1e-12);
  CHECK(std::abs(c[2] - 0.4) < 1e-12);
}

TEST_CASE("coefficient functionals are linear") {
  NashBasis basis(3, identity_matrix(3));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> P(9), Q(9), S(9);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        double a = dist(rng), b = dist(rng);
        P[j * 3 + i] = P[i * 3 + j] = a;
        Q[j * 3 + i] = Q[i * 3 + j] = b;
        S[j * 3 + i] = S[i * 3 + j] = a + b;
      }
    for (int i = 0; i < basis.count(); ++i)
      CHECK(std::abs(basis.coefficient(i, S.data()) - basis.coefficient(i, P.data()) -
                     basis.coefficient(i, Q.data())) < 1e-14);
  }
}

TEST_CASE("random symmetric matrices reconstruct exactly") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n = 2; n <= 4; ++n) {
    NashBasis basis(n, identity_matrix(n));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> P(n * n), R(n * n), c(basis.count());
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) P[j * n + i] = P[i * n + j] = dist(rng);
      basis.coefficients(P.data(), c.data());
      basis.reconstruct(c.data(), R.data());
      for (int e = 0; e < n * n; ++e) CHECK(std::abs(R[e] - P[e]) < 1e-12);
    }
  }
}

TEST_CASE("sigma0 is positive away from the coordinate boundary") {
  for (int n = 2; n <= 4; ++n) {
    std::vector<double> ones(n * (n + 1) / 2, 1.0);
    NashBasis probe(n, identity_matrix(n));
    std::vector<double> P0(n * n);
    probe.reconstruct(ones.data(), P0.data());
    NashBasis basis(n, P0);
    CHECK(basis.sigma0() > 0.0);
    for (double l : basis.l_at_p0()) CHECK(l == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("nash_decompose of 2*Id gives sqrt(2), sqrt(2), 0") {
  NashBasis basis(2, identity_matrix(2));
  MetricField P = constant_metric(2, 16, {2, 0, 0, 2});
  DecomposeResult r = nash_decompose(P, basis);
  CHECK(r.amplitudes[0].at(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.amplitudes[1].at(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.amplitudes[2].at(0, 0) == 0.0);
  CHECK(r.reconstruction_residual <= 1e-10);
  CHECK(r.clamp_count == P.node_count());  // the third coordinate is exactly zero
}

TEST_CASE("a node dipped below the decomposition radius is reported") {
  NashBasis basis(2, identity_matrix(2));
  MetricField P = constant_metric(2, 16, {1, 0.2, 0.2, 1});
  const std::int64_t bad_node = 37;
  P.set_entry(bad_node, 0, 1, -0.2);  // L3 = -0.4 < 0 there
  CHECK_THROWS_WITH_AS(nash_decompose(P, basis),
                       "oscillation exceeds decomposition radius at node 37", Error);
}

TEST_CASE("reconstruction residual stays below 1e-10 on random admissible fields") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0.2, 1.0);
  NashBasis basis(3, identity_matrix(3));
  MetricField P(3, 8);
  for (std::int64_t node = 0; node < P.node_count(); ++node) {
    std::vector<double> c(basis.count()), M(9);
    for (auto& v : c) v = dist(rng);
    basis.reconstruct(c.data(), M.data());
    P.set_node_matrix(node, M.data());
  }
  DecomposeResult r = nash_decompose(P, basis);
  CHECK(r.reconstruction_residual <= 1e-10);
}

TEST_CASE("perturbed decomposition with zero perturbations equals the plain one") {
  NashBasis basis(2, identity_matrix(2));
  MetricField P = constant_metric(2, 16, {1.2, 0.15, 0.15, 0.9});
  std::vector<MetricField> Lambda{MetricField(2, 16)};
  std::vector<MetricField> Theta{MetricField(2, 16)};
  DecomposeResult plain = nash_decompose(P, basis);
  DecomposeResult pert = perturbed_decompose(P, Lambda, Theta, basis, 1);
  for (int i = 0; i < basis.count(); ++i)
    CHECK(sup_diff(plain.amplitudes[i], pert.amplitudes[i]) < 1e-14);
  CHECK(pert.picard_iterations <= 2);
}

TEST_CASE("small perturbations converge fast with tiny residual") {
  NashBasis basis(2, identity_matrix(2));
  const int R = 24;
  MetricField P = constant_metric(2, R, {1.0, 0.2, 0.2, 1.0});
  std::vector<MetricField> Lambda, Theta;
  MetricField L(2, R), T(2, R);
  for (std::int64_t node = 0; node < L.node_count(); ++node) {
    auto x = L.field().position(node);
    double v = 1e-3 * std::sin(x[0]) * std::cos(x[1]);
    L.set_entry(node, 0, 0, v);
    L.set_entry(node, 1, 1, -v);
    L.set_entry(node, 0, 1, 0.5 * v);
    T.set_entry(node, 0, 0, 2e-4 * std::cos(x[0]));
  }
  Lambda.push_back(L);
  Theta.push_back(T);
  DecomposeResult r = perturbed_decompose(P, Lambda, Theta, basis, 1);
  CHECK(r.picard_iterations <= 10);
  CHECK(r.reconstruction_residual <= 1e-10);
}

TEST_CASE("perturbation ramp fails loudly before the residual degrades") {
  NashBasis basis(2, identity_matrix(2));
  double sigma1 = calibrate_sigma1(basis, 12);
  CHECK(sigma1 > 0.0);
  const int R = 12;
  MetricField P = constant_metric(2, R, {1.0, 0.2, 0.2, 1.0});
  std::vector<MetricField> Lambda, Theta;
  MetricField L(2, R), T(2, R);
  for (std::int64_t node = 0; node < L.node_count(); ++node) {
    auto x = L.field().position(node);
    double v = 20.0 * std::sin(x[0]);
    L.set_entry(node, 0, 0, v);
    L.set_entry(node, 1, 1, v);
  }
  Lambda.push_back(L);
  Theta.push_back(T);
  CHECK_THROWS_AS(perturbed_decompose(P, Lambda, Theta, basis, 1), Error);
}

TEST_CASE("perturbed decomposition is continuous in Lambda") {
  NashBasis basis(2, identity_matrix(2));
  const int R = 12;
  MetricField P = constant_metric(2, R, {1.0, 0.2, 0.2, 1.0});
  auto run = [&](double amp) {
    std::vector<MetricField> Lambda{MetricField(2, R)}, Theta{MetricField(2, R)};
    for (std::int64_t node = 0; node < P.node_count(); ++node) {
      auto x = P.field().position(node);
      Lambda[0].set_entry(node, 0, 0, amp * std::sin(x[0]));
      Lambda[0].set_entry(node, 1, 1, amp * std::cos(x[1]));
    }
    return perturbed_decompose(P, Lambda, Theta, basis, 1);
  };
  DecomposeResult base = run(1e-3);
  double eta = 1e-5;
  DecomposeResult bumped = run(1e-3 + eta);
  double change = 0.0;
  for (int i = 0; i < basis.count(); ++i)
    change = std::max(change, sup_diff(base.amplitudes[i], bumped.amplitudes[i]));
  CHECK(change <= 10.0 * eta);
  CHECK(change > 0.0);
}

TEST_CASE("conformal factorization: constant conformal metric is already isothermal") {
  const double c = 1.15;
  MetricField P = constant_metric(2, 32, {c * c, 0, 0, c * c});
  ConformalFactorization f = conformal_factorize(P);
  CHECK(f.residual <= 1e-12);
  CHECK(sup_norm(f.phi) <= 1e-12);
  for (std::int64_t node = 0; node < f.a.node_count(); ++node)
    CHECK(f.a.at(node, 0) == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("conformally flat metrics keep identity coordinates") {
  const int R = 64;
  MetricField P(2, R);
  for (std::int64_t node = 0; node < P.node_count(); ++node) {
    auto x = P.field().position(node);
    double f = 0.1 * std::sin(x[0]) * std::sin(x[1]);
    double e2f = std::exp(2.0 * f);
    P.set_entry(node, 0, 0, e2f);
    P.set_entry(node, 1, 1, e2f);
    P.set_entry(node, 0, 1, 0.0);
  }
  ConformalFactorization f = conformal_factorize(P);
  CHECK(sup_norm(f.phi) <= 1e-12);  // mu vanishes identically
  double err = 0.0;
  for (std::int64_t node = 0; node < f.a.node_count(); ++node) {
    auto x = f.a.position(node);
    err = std::max(err, std::abs(f.a.at(node, 0) - std::exp(0.1 * std::sin(x[0]) * std::sin(x[1]))));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("near-flat perturbed metric factorizes within tolerance") {
  const int R = 64;
  MetricField P(2, R);
  for (std::int64_t node = 0; node < P.node_count(); ++node) {
    auto x = P.field().position(node);
    double s = std::sin(x[0]) * std::cos(x[1]);
    double t = std::cos(x[0] + x[1]);
    P.set_entry(node, 0, 0, 1.0 + 0.1 * s);
    P.set_entry(node, 1, 1, 1.0 - 0.08 * t);
    P.set_entry(node, 0, 1, 0.05 * std::sin(x[1]));
  }
  ConformalFactorization f = conformal_factorize(P);
  CHECK(f.residual <= 1e-6 * sup_norm(P.field()));
  CHECK(f.det_min >= 0.5);
  CHECK(f.a_min >= 0.5);
  // Direct substitution with the grid derivatives.
  PeriodicField d1 = diff(f.phi, 0, 1), d2 = diff(f.phi, 1, 1);
  double worst = 0.0;
  for (std::int64_t node = 0; node < P.node_count(); ++node) {
    double g1x = f.wave[0][0] + d1.at(node, 0), g1y = f.wave[0][1] + d2.at(node, 0);
    double g2x = f.wave[1][0] + d1.at(node, 1), g2y = f.wave[1][1] + d2.at(node, 1);
    double a2 = f.a.at(node, 0) * f.a.at(node, 0);
    worst = std::max(worst, std::abs(P.entry(node, 0, 0) - a2 * (g1x * g1x + g2x * g2x)));
    worst = std::max(worst, std::abs(P.entry(node, 0, 1) - a2 * (g1x * g1y + g2x * g2y)));
    worst = std::max(worst, std::abs(P.entry(node, 1, 1) - a2 * (g1y * g1y + g2y * g2y)));
  }
  CHECK(worst <= 1.0000001 * f.residual);
}

TEST_CASE("conformal factorization rejects non-elliptic and far-from-flat input") {
  MetricField bad = constant_metric(2, 16, {1, 0, 0, -0.5});
  CHECK_THROWS_AS(conformal_factorize(bad), Error);
  MetricField far = constant_metric(2, 16, {1.9, 0, 0, 0.6});
  CHECK_THROWS_AS(conformal_factorize(far), Error);
}
