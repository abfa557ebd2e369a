#pragma once

#include <string>
#include <vector>

#include "ci/field.hpp"

namespace ci {

/// Cumulative Hölder norm report: norm(j) = sum of seminorms [f]_0..[f]_j.
struct HolderReport {
  double sup_norm = 0.0;   // ||f||_0
  double grad_sup = 0.0;   // ||f||_1
  double hess_sup = 0.0;   // ||f||_2
  double grad_semi = 0.0;  // [f]_1
  double hess_semi = 0.0;  // [f]_2
  std::vector<double> alphas;
  std::vector<double> seminorms;  // [f]_alpha, matching alphas
  std::string method = "6th-order centered stencil; pair sampling d<=0.25, <=1e6 pairs";
};

/// Centered periodic finite difference along an axis, 6th-order stencil.
/// order: 1 (first derivative) or 2 (second derivative).
PeriodicField diff(const PeriodicField& f, int axis, int order);

/// Induced metric grad(u)^T grad(u) per node via diff(.,.,1).
MetricField induced_metric(const PeriodicField& u);

/// Sup norms from node maxima; [f]_alpha by deterministic subsampled pair
/// sweep over flat-torus distances <= 0.25.
HolderReport holder_norms(const PeriodicField& f, const std::vector<double>& alphas = {});

/// Periodic convolution with the tensorized C_c^inf bump exp(-1/(1-t^2))
/// scaled to radius ell, discretely normalized to unit mass.
PeriodicField mollify(const PeriodicField& f, double ell);

MetricField mollify(const MetricField& f, double ell);

/// Pointwise L2 norm across components, as a scalar field.
PeriodicField pointwise_norm(const PeriodicField& f);
/// Max over nodes of the component-Euclidean norm.
double sup_norm(const PeriodicField& f);
double sup_norm(const MetricField& f);
/// Max over nodes/components of |a-b|.
double sup_diff(const PeriodicField& a, const PeriodicField& b);

/// 1-D bump kernel weights at grid spacing h and radius ell (normalized).
std::vector<double> mollifier_weights(double ell, double h);

// Serial reference implementations kept for testing the parallel kernels.
namespace ref {
PeriodicField diff(const PeriodicField& f, int axis, int order);
MetricField induced_metric(const PeriodicField& u);
PeriodicField mollify(const PeriodicField& f, double ell);
double holder_seminorm(const PeriodicField& f, double alpha);
}  // namespace ref

/// Parallel seminorm used by holder_norms (exposed for the benchmark).
double holder_seminorm(const PeriodicField& f, double alpha);

}  // namespace ci
