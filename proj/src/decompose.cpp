#include "ci/decompose.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ci/grid_ops.hpp"
#include "ci/parallel.hpp"

namespace ci {

NashBasis::NashBasis(int n, const std::vector<double>& p0) : n_(n), nstar_(n * (n + 1) / 2) {
  if (n < 2 || n > kMaxDim) throw Error("nash_basis: dimension out of range");
  if (static_cast<int>(p0.size()) != n * n) throw Error("nash_basis: P0 must be n x n");
  Eigen::Map<const Eigen::MatrixXd> P0(p0.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P0);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error("nash_basis: P0 must be positive definite");

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    xi_.push_back(v);
    std::array<int, kMaxDim> w{};
    w[i] = 1;
    wave_.push_back(w);
    amp_scale_.push_back(1.0);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<double> v(n, 0.0);
      v[i] = inv_sqrt2;
      v[j] = inv_sqrt2;
      xi_.push_back(v);
      std::array<int, kMaxDim> w{};
      w[i] = 1;
      w[j] = 1;
      wave_.push_back(w);
      amp_scale_.push_back(inv_sqrt2);
    }

  // Frame system M[slot, i] = (xi_i xi_i^T)_{ab}, slots = upper triangle.
  Eigen::MatrixXd M(nstar_, nstar_);
  for (int i = 0; i < nstar_; ++i) {
    int slot = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) M(slot++, i) = xi_[i][a] * xi_[i][b];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) throw Error("nash_basis: singular frame system");
  Eigen::MatrixXd Minv = lu.inverse();

  // Row i of Minv as a dual matrix: off-diagonal slots contribute to two
  // entries of the full contraction, so each carries half the weight.
  dual_.assign(nstar_, std::vector<double>(n * n, 0.0));
  for (int i = 0; i < nstar_; ++i) {
    int slot = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        double w = Minv(i, slot++);
        if (a == b) {
          dual_[i][a * n + a] = w;
        } else {
          dual_[i][b * n + a] = 0.5 * w;
          dual_[i][a * n + b] = 0.5 * w;
        }
      }
  }

  l_p0_.resize(nstar_);
  coefficients(p0.data(), l_p0_.data());
  sigma0_ = 1e300;
  for (int i = 0; i < nstar_; ++i) {
    double dual_norm = 0.0;
    for (double d : dual_[i]) dual_norm += d * d;
    dual_norm = std::sqrt(dual_norm);
    sigma0_ = std::min(sigma0_, 0.5 * l_p0_[i] / dual_norm);
  }
  sigma0_ = std::max(sigma0_, 0.0);
}

double NashBasis::coefficient(int i, const double* P) const {
  double s = 0.0;
  for (int e = 0; e < n_ * n_; ++e) s += dual_[i][e] * P[e];
  return s;
}

void NashBasis::coefficients(const double* P, double* out) const {
  for (int i = 0; i < nstar_; ++i) out[i] = coefficient(i, P);
}

void NashBasis::reconstruct(const double* coeffs, double* P_out) const {
  for (int e = 0; e < n_ * n_; ++e) P_out[e] = 0.0;
  for (int i = 0; i < nstar_; ++i)
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) P_out[b * n_ + a] += coeffs[i] * xi_[i][a] * xi_[i][b];
}

namespace {

constexpr double kNegativeTol = -1e-12;
constexpr double kClampTol = 1e-14;

struct NodeDecompose {
  bool ok = true;
  std::int64_t bad_node = -1;
  std::int64_t clamps = 0;
};

}  // namespace

DecomposeResult nash_decompose(const MetricField& P, const NashBasis& basis) {
  const int n = P.dim();
  if (n != basis.dim()) throw Error("nash_decompose: basis dimension mismatch");
  const int ns = basis.count();
  const std::int64_t nn = P.node_count();

  DecomposeResult out;
  for (int i = 0; i < ns; ++i) out.amplitudes.emplace_back(n, 1, P.resolution());

  std::vector<std::int64_t> bad(static_cast<std::size_t>(max_threads()), -1);
  std::vector<std::int64_t> clamps(static_cast<std::size_t>(max_threads()), 0);
#if defined(_OPENMP)
#pragma omp parallel
#endif
  {
#if defined(_OPENMP)
    int tid = omp_get_thread_num();
#else
    int tid = 0;
#endif
    std::vector<double> M(n * n), L(ns);
#if defined(_OPENMP)
#pragma omp for schedule(static)
#endif
    for (std::int64_t node = 0; node < nn; ++node) {
      P.node_matrix(node, M.data());
      basis.coefficients(M.data(), L.data());
      for (int i = 0; i < ns; ++i) {
        double l = L[i];
        if (l < kNegativeTol) {
          if (bad[tid] < 0) bad[tid] = node;
          l = 0.0;
        } else if (l < kClampTol) {
          ++clamps[tid];
          l = 0.0;
        }
        out.amplitudes[i].at(node, 0) = std::sqrt(l);
      }
    }
  }
  for (auto b : bad)
    if (b >= 0)
      throw Error("oscillation exceeds decomposition radius at node " + std::to_string(b));
  for (auto c : clamps) out.clamp_count += c;

  // Residual of the exact linear solve followed by square/sqrt.
  out.reconstruction_residual = parallel_max(nn, [&](std::int64_t node) {
    std::vector<double> M(n * n), R(n * n), L(ns);
    P.node_matrix(node, M.data());
    for (int i = 0; i < ns; ++i) {
      double a = out.amplitudes[i].at(node, 0);
      L[i] = a * a;
    }
    basis.reconstruct(L.data(), R.data());
    double r = 0.0;
    for (int e = 0; e < n * n; ++e) r = std::max(r, std::abs(R[e] - M[e]));
    return r;
  });
  return out;
}

DecomposeResult perturbed_decompose(const MetricField& P, const std::vector<MetricField>& Lambda,
                                    const std::vector<MetricField>& Theta, const NashBasis& basis,
                                    int N0) {
  const int n = P.dim();
  const int ns = basis.count();
  if (N0 < 0 || N0 > ns) throw Error("perturbed_decompose: N0 out of range");
  if (static_cast<int>(Lambda.size()) < N0 || static_cast<int>(Theta.size()) < N0 * N0)
    throw Error("perturbed_decompose: missing perturbation fields");
  const std::int64_t nn = P.node_count();

  DecomposeResult cur = nash_decompose(P, basis);
  MetricField Q(n, P.resolution());
  for (int it = 1; it <= 100; ++it) {
    // Q = P - sum a_k Lambda_k - sum a_k a_l Theta_kl.
    parallel_for(nn, [&](std::int64_t node) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double v = P.entry(node, i, j);
          for (int k = 0; k < N0; ++k) v -= cur.amplitudes[k].at(node, 0) * Lambda[k].entry(node, i, j);
          for (int k = 0; k < N0; ++k)
            for (int l = 0; l < N0; ++l)
              v -= cur.amplitudes[k].at(node, 0) * cur.amplitudes[l].at(node, 0) *
                   Theta[k * N0 + l].entry(node, i, j);
          Q.set_entry(node, i, j, v);
        }
    });
    DecomposeResult next;
    try {
      next = nash_decompose(Q, basis);
    } catch (const Error&) {
      throw Error("perturbation exceeds contraction radius");
    }
    double change = 0.0;
    for (int i = 0; i < ns; ++i) change = std::max(change, sup_diff(next.amplitudes[i], cur.amplitudes[i]));
    next.picard_iterations = it;
    cur.amplitudes = std::move(next.amplitudes);
    cur.clamp_count = next.clamp_count;
    cur.picard_iterations = it;
    if (change <= 1e-12) break;
    if (it == 100) throw Error("perturbation exceeds contraction radius");
  }

  // Residual of the full perturbed identity.
  cur.reconstruction_residual = parallel_max(nn, [&](std::int64_t node) {
    std::vector<double> M(n * n), R(n * n), L(ns);
    P.node_matrix(node, M.data());
    for (int i = 0; i < ns; ++i) {
      double a = cur.amplitudes[i].at(node, 0);
      L[i] = a * a;
    }
    basis.reconstruct(L.data(), R.data());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < N0; ++k) v += cur.amplitudes[k].at(node, 0) * Lambda[k].entry(node, i, j);
        for (int k = 0; k < N0; ++k)
          for (int l = 0; l < N0; ++l)
            v += cur.amplitudes[k].at(node, 0) * cur.amplitudes[l].at(node, 0) *
                 Theta[k * N0 + l].entry(node, i, j);
        R[j * n + i] += v;
      }
    double r = 0.0;
    for (int e = 0; e < n * n; ++e) r = std::max(r, std::abs(R[e] - M[e]));
    return r;
  });
  return cur;
}

double calibrate_sigma1(const NashBasis& basis, int resolution) {
  const int n = basis.dim();
  const int N0 = std::max(1, n / 2);
  MetricField P(n, resolution);
  const std::int64_t nn = P.node_count();
  // Base point: the matrix whose canonical coordinates are all 1.
  std::vector<double> ones(basis.count(), 1.0), P0(n * n);
  basis.reconstruct(ones.data(), P0.data());
  for (std::int64_t node = 0; node < nn; ++node) P.set_node_matrix(node, P0.data());

  auto make_lambda = [&](double amp) {
    std::vector<MetricField> Lambda, Theta;
    for (int k = 0; k < N0; ++k) {
      MetricField L(n, resolution);
      for (std::int64_t node = 0; node < nn; ++node) {
        auto x = L.field().position(node);
        double v = amp * std::sin(x[0] + k) * std::cos(x[1]);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) L.set_entry(node, i, j, (i == j) ? v : 0.5 * v);
      }
      Lambda.push_back(L);
    }
    for (int k = 0; k < N0 * N0; ++k) {
      MetricField T(n, resolution);
      for (std::int64_t node = 0; node < nn; ++node) {
        auto x = T.field().position(node);
        double v = 0.25 * amp * std::cos(x[0] + 2 * k);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) T.set_entry(node, i, j, (i == j) ? v : 0.25 * v);
      }
      Theta.push_back(T);
    }
    return std::pair(Lambda, Theta);
  };

  auto converges = [&](double amp) {
    auto [Lambda, Theta] = make_lambda(amp);
    try {
      DecomposeResult r = perturbed_decompose(P, Lambda, Theta, basis, N0);
      return r.reconstruction_residual <= 1e-8;
    } catch (const Error&) {
      return false;
    }
  };

  double lo = 0.0, hi = 0.05;
  while (converges(hi) && hi < 64.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 24; ++it) {
    double mid = 0.5 * (lo + hi);
    if (converges(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace ci
