#include <cmath>
#include <string>

#include "ci/decompose.hpp"
#include "ci/grid_ops.hpp"
#include "ci/parallel.hpp"

namespace ci {

namespace {

// Deterministic dot product: per-row partial sums combined in row order.
double det_dot(const PeriodicField& a, const PeriodicField& b) {
  const int R = a.resolution();
  const std::int64_t row_len = a.node_count() / R;
  return block_sum(R, [&](std::int64_t r) {
    double s = 0.0;
    for (std::int64_t i = r * row_len; i < (r + 1) * row_len; ++i) s += a.at(i, 0) * b.at(i, 0);
    return s;
  });
}

double field_mean(const PeriodicField& f, int c) {
  const int R = f.resolution();
  const std::int64_t row_len = f.node_count() / R;
  return block_sum(R, [&](std::int64_t r) {
           double s = 0.0;
           for (std::int64_t i = r * row_len; i < (r + 1) * row_len; ++i) s += f.at(i, c);
           return s;
         }) /
         static_cast<double>(f.node_count());
}

void subtract_mean(PeriodicField& f) {
  double mean = field_mean(f, 0);
  parallel_for(f.node_count(), [&](std::int64_t i) { f.at(i, 0) -= mean; });
}

// -Laplacian with the 6th-order second-derivative stencils.
PeriodicField neg_laplace(const PeriodicField& f) {
  PeriodicField lx = diff(f, 0, 2);
  PeriodicField ly = diff(f, 1, 2);
  PeriodicField out = PeriodicField::zeros_like(f);
  parallel_for(f.node_count(), [&](std::int64_t i) { out.at(i, 0) = -(lx.at(i, 0) + ly.at(i, 0)); });
  return out;
}

// CG for -Lap u = rhs on mean-zero periodic scalars.
PeriodicField poisson_solve(const PeriodicField& rhs_in, double tol_rel, int max_iter) {
  PeriodicField rhs = rhs_in;
  subtract_mean(rhs);
  PeriodicField x(rhs.dim_domain(), 1, rhs.resolution());
  PeriodicField r = rhs;
  PeriodicField p = r;
  double rr = det_dot(r, r);
  const double rhs_norm = std::sqrt(rr);
  if (rhs_norm == 0.0) return x;
  const double tol = tol_rel * rhs_norm;
  for (int it = 0; it < max_iter; ++it) {
    PeriodicField Ap = neg_laplace(p);
    double pAp = det_dot(p, Ap);
    if (pAp <= 0.0) break;
    double alpha = rr / pAp;
    parallel_for(x.node_count(), [&](std::int64_t i) {
      x.at(i, 0) += alpha * p.at(i, 0);
      r.at(i, 0) -= alpha * Ap.at(i, 0);
    });
    double rr_new = det_dot(r, r);
    if (std::sqrt(rr_new) <= tol) break;
    double beta = rr_new / rr;
    rr = rr_new;
    parallel_for(p.node_count(), [&](std::int64_t i) { p.at(i, 0) = r.at(i, 0) + beta * p.at(i, 0); });
  }
  subtract_mean(x);
  return x;
}

}  // namespace

ConformalFactorization conformal_factorize(const MetricField& P, double gamma, double tol_rel,
                                           int max_iter) {
  if (P.dim() != 2) throw Error("conformal_factorize: requires n = 2");
  const std::int64_t nn = P.node_count();
  const int R = P.resolution();

  double bad = parallel_max(nn, [&](std::int64_t node) {
    double E = P.entry(node, 0, 0), G = P.entry(node, 1, 1), F = P.entry(node, 0, 1);
    double tr = E + G, det = E * G - F * F;
    double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    double lmin = 0.5 * (tr - disc), lmax = 0.5 * (tr + disc);
    return (lmin < 1.0 / gamma || lmax > gamma) ? 1.0 : 0.0;
  });
  if (bad > 0.0) throw Error("conformal_factorize: P not uniformly elliptic");

  // Beltrami coefficient of P; its sup norm is the conformal-gauge distance
  // from flatness and gates the solver's validity region.
  PeriodicField mu(2, 2, R);
  parallel_for(nn, [&](std::int64_t node) {
    double E = P.entry(node, 0, 0), G = P.entry(node, 1, 1), F = P.entry(node, 0, 1);
    double den = E + G + 2.0 * std::sqrt(std::max(0.0, E * G - F * F));
    mu.at(node, 0) = (E - G) / den;
    mu.at(node, 1) = 2.0 * F / den;
  });
  double mu_sup = sup_norm(mu);
  if (mu_sup > 0.125) throw Error("conformal_factorize: metric outside near-flat range");

  ConformalFactorization out;
  out.mu_sup = mu_sup;
  out.phi = PeriodicField(2, 2, R);
  out.a = PeriodicField(2, 1, R);

  // Evaluates the reconstruction with the current linear part and psi.
  auto measure = [&](const PeriodicField& psi, const std::array<std::array<double, 2>, 2>& W,
                     PeriodicField& a_field, double& det_min, double& a_min) {
    PeriodicField d1 = diff(psi, 0, 1), d2 = diff(psi, 1, 1);
    double res = parallel_max(nn, [&](std::int64_t node) {
      double g1x = W[0][0] + d1.at(node, 0), g1y = W[0][1] + d2.at(node, 0);
      double g2x = W[1][0] + d1.at(node, 1), g2y = W[1][1] + d2.at(node, 1);
      double q11 = g1x * g1x + g2x * g2x;
      double q22 = g1y * g1y + g2y * g2y;
      double q12 = g1x * g1y + g2x * g2y;
      double a2 = (P.entry(node, 0, 0) + P.entry(node, 1, 1)) / (q11 + q22);
      a_field.at(node, 0) = std::sqrt(a2);
      double r = std::abs(P.entry(node, 0, 0) - a2 * q11);
      r = std::max(r, std::abs(P.entry(node, 1, 1) - a2 * q22));
      r = std::max(r, std::abs(P.entry(node, 0, 1) - a2 * q12));
      return r;
    });
    det_min = -parallel_max(nn, [&](std::int64_t node) {
      double g1x = W[0][0] + d1.at(node, 0), g1y = W[0][1] + d2.at(node, 0);
      double g2x = W[1][0] + d1.at(node, 1), g2y = W[1][1] + d2.at(node, 1);
      return -(g1x * g2y - g1y * g2x);
    });
    a_min = -parallel_max(nn, [&](std::int64_t node) { return -a_field.at(node, 0); });
    return res;
  };

  const double p_sup = sup_norm(P.field());
  const double target = tol_rel * p_sup;
  PeriodicField psi(2, 2, R);  // periodic correction (psi_1, psi_2)
  std::array<double, 2> beta{0.0, 0.0};

  for (int it = 0; it < max_iter; ++it) {
    // q = mu * (1 + dz psi); the z-bar-linear coefficient beta = mean(q)
    // and dz-bar psi = q - mean(q).
    PeriodicField d1 = diff(psi, 0, 1), d2 = diff(psi, 1, 1);
    PeriodicField q(2, 2, R);
    parallel_for(nn, [&](std::int64_t node) {
      double wre = 1.0 + 0.5 * (d1.at(node, 0) + d2.at(node, 1));
      double wim = 0.5 * (d1.at(node, 1) - d2.at(node, 0));
      double mre = mu.at(node, 0), mim = mu.at(node, 1);
      q.at(node, 0) = mre * wre - mim * wim;
      q.at(node, 1) = mre * wim + mim * wre;
    });
    beta = {field_mean(q, 0), field_mean(q, 1)};
    // rhs = 4 dz q (the constant beta is annihilated by dz).
    PeriodicField q1 = diff(q, 0, 1), q2 = diff(q, 1, 1);
    PeriodicField rhs_re(2, 1, R), rhs_im(2, 1, R);
    parallel_for(nn, [&](std::int64_t node) {
      rhs_re.at(node, 0) = -4.0 * 0.5 * (q1.at(node, 0) + q2.at(node, 1));
      rhs_im.at(node, 0) = -4.0 * 0.5 * (q1.at(node, 1) - q2.at(node, 0));
    });
    PeriodicField s_re = poisson_solve(rhs_re, 1e-12, 20000);
    PeriodicField s_im = poisson_solve(rhs_im, 1e-12, 20000);
    PeriodicField next(2, 2, R);
    parallel_for(nn, [&](std::int64_t node) {
      next.at(node, 0) = s_re.at(node, 0);
      next.at(node, 1) = s_im.at(node, 0);
    });
    double change = sup_diff(next, psi);
    psi = next;
    out.iterations = it + 1;

    // w = z + beta z-bar + psi in real form.
    out.wave = {{{1.0 + beta[0], beta[1]}, {beta[1], 1.0 - beta[0]}}};
    double dmin, amin;
    double res = measure(psi, out.wave, out.a, dmin, amin);
    out.residual_history.push_back(res);
    out.det_min = dmin;
    out.a_min = amin;
    if (res <= target || change <= 1e-13) break;
  }

  out.phi = psi;
  double dmin, amin;
  out.residual = measure(psi, out.wave, out.a, dmin, amin);
  out.det_min = dmin;
  out.a_min = amin;
  if (out.residual > target) {
    std::string hist;
    for (double rr : out.residual_history) hist += " " + std::to_string(rr);
    throw Error("conformal solver residual above tolerance:" + hist);
  }
  return out;
}

}  // namespace ci
