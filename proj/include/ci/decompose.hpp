#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ci/field.hpp"

namespace ci {

/// Nash frame for symmetric n x n matrices: the n* = n(n+1)/2 unit vectors
/// {e_i} followed by {(e_i+e_j)/sqrt(2), i<j} in lexicographic order, with
/// the linear coefficient functionals L_i obtained by inverting the frame
/// system. Every frame vector is also carried as an integer wave vector so
/// torus phases x .  xi stay exactly periodic after the 1/sqrt(2) rescale.
class NashBasis {
 public:
  NashBasis(int n, const std::vector<double>& p0);  // p0: column-major n x n

  int dim() const { return n_; }
  int count() const { return nstar_; }

  const std::vector<double>& xi(int i) const { return xi_[i]; }          // unit vector
  const std::array<int, kMaxDim>& wave(int i) const { return wave_[i]; }  // integer gradient
  double amp_scale(int i) const { return amp_scale_[i]; }                 // 1/|wave|

  /// L_i(P) for a column-major n x n symmetric matrix.
  double coefficient(int i, const double* P) const;
  void coefficients(const double* P, double* out) const;

  /// Reconstruction sum_i c_i xi_i xi_i^T into a column-major buffer.
  void reconstruct(const double* coeffs, double* P_out) const;

  double sigma0() const { return sigma0_; }
  const std::vector<double>& l_at_p0() const { return l_p0_; }

 private:
  int n_ = 0, nstar_ = 0;
  std::vector<std::vector<double>> xi_;
  std::vector<std::array<int, kMaxDim>> wave_;
  std::vector<double> amp_scale_;
  std::vector<std::vector<double>> dual_;  // D_i, column-major n x n
  std::vector<double> l_p0_;
  double sigma0_ = 0.0;
};

struct DecomposeResult {
  std::vector<PeriodicField> amplitudes;  // a_i = sqrt(L_i(P)), n* fields
  double reconstruction_residual = 0.0;   // sup |sum a_i^2 xi xi^T - P|
  std::int64_t clamp_count = 0;           // L_i in [-1e-12, 1e-14) clamped to 0
  int picard_iterations = 0;              // 0 for the plain decomposition
};

/// a_i = sqrt(L_i(P)) nodewise; errors if any L_i drops below -1e-12.
DecomposeResult nash_decompose(const MetricField& P, const NashBasis& basis);

/// Lemma-3.4-style Picard iteration solving
///   P = sum_i a_i^2 xi_i xi_i^T + sum_{k<=N0} a_k Lambda_k
///       + sum_{k,l<=N0} a_k a_l Theta_{kl}.
/// Lambda: N0 metric fields; Theta: N0*N0 metric fields (row-major k,l).
DecomposeResult perturbed_decompose(const MetricField& P, const std::vector<MetricField>& Lambda,
                                    const std::vector<MetricField>& Theta, const NashBasis& basis,
                                    int N0);

/// Largest perturbation amplitude (sup norm of a reference Lambda ramp) for
/// which perturbed_decompose still converges; bisection calibration of the
/// contraction radius sigma_1.
double calibrate_sigma1(const NashBasis& basis, int resolution = 16);

struct ConformalFactorization {
  PeriodicField phi;  // periodic parts (phi_1, phi_2), k=2
  /// Linear part of Phi: identity plus the constant symmetric traceless
  /// correction that absorbs the mean Beltrami coefficient (the torus
  /// modulus); Phi_k(x) = wave[k] . x + phi_k(x).
  std::array<std::array<double, 2>, 2> wave{{{1.0, 0.0}, {0.0, 1.0}}};
  PeriodicField a;        // conformal factor, k=1
  double residual = 0.0;  // sup |P - a^2 sum grad Phi x grad Phi|
  double det_min = 0.0;
  double a_min = 0.0;
  double mu_sup = 0.0;  // sup |Beltrami coefficient of P|
  std::vector<double> residual_history;
  int iterations = 0;
};

/// Isothermal factorization of a near-flat torus metric (n = 2) by the
/// damped Beltrami fixed point with a finite-difference Poisson solve.
/// Admissible inputs: uniformly elliptic with sup |mu(P)| <= 0.125
/// (the conformal-gauge reading of ||P - Id|| <= 0.3).
ConformalFactorization conformal_factorize(const MetricField& P, double gamma = 4.0,
                                           double tol_rel = 1e-6, int max_iter = 60);

}  // namespace ci
