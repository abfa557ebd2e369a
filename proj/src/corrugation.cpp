#include "ci/corrugation.hpp"

#include <cmath>
#include <ostream>

namespace ci {

namespace {

constexpr double kFirstZeroJ0 = 2.404825557695773;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, x); }
double bessel_j1(double x) { return std::cyl_bessel_j(1.0, x); }

// Solve J0(a) * sqrt(1+s^2) = 1 on [0, first zero of J0).
double solve_closure(double s, double guess) {
  const double target = 1.0 / std::sqrt(1.0 + s * s);
  double lo = 0.0, hi = kFirstZeroJ0 - 1e-9;
  double a = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    double f = bessel_j0(a) - target;
    if (std::abs(f) < 1e-14) break;
    if (f > 0)
      lo = a;  // J0 decreasing: f > 0 means a below the root
    else
      hi = a;
    double df = -bessel_j1(a);
    double step = (df != 0.0) ? f / df : 0.0;
    double next = a - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    a = next;
  }
  return a;
}

}  // namespace

CorrugationProfile::CorrugationProfile(double s_max, int table_size, int panels_per_period)
    : s_max_(s_max), panels_(panels_per_period) {
  if (!(s_max_ > 0.0) || s_max_ > 2.0) throw Error("corrugation s_max out of supported range");
  if (table_size < 8) throw Error("corrugation table too small");
  if (panels_ < 8) throw Error("corrugation quadrature too coarse");
  panel_width_ = kPeriod / panels_;
  table_s_.resize(table_size);
  table_a_.resize(table_size);
  table_da_.resize(table_size);
  for (int i = 0; i < table_size; ++i) {
    double s = s_max_ * i / (table_size - 1);
    table_s_[i] = s;
    table_a_[i] = (i == 0) ? 0.0 : solve_closure(s, i > 1 ? table_a_[i - 1] : 0.2);
  }
  for (int i = 0; i < table_size; ++i) {
    double s = table_s_[i], a = table_a_[i];
    table_da_[i] = (a < 1e-10) ? std::sqrt(2.0) : s * std::pow(1.0 + s * s, -1.5) / bessel_j1(a);
  }
}

void CorrugationProfile::check_range(double s) const {
  if (s < 0.0 || s > s_max_ * (1.0 + 1e-12)) throw Error("amplitude out of corrugation range");
}

double CorrugationProfile::alpha(double s) const {
  check_range(s);
  if (s <= 0.0) return 0.0;
  // Cubic Hermite between table nodes, then one Newton polish.
  const int N = static_cast<int>(table_s_.size());
  double u = s / s_max_ * (N - 1);
  int i = std::min(N - 2, static_cast<int>(u));
  double t = u - i;
  double h = table_s_[i + 1] - table_s_[i];
  double p0 = table_a_[i], p1 = table_a_[i + 1];
  double m0 = table_da_[i] * h, m1 = table_da_[i + 1] * h;
  double t2 = t * t, t3 = t2 * t;
  double a = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
  const double target = 1.0 / std::sqrt(1.0 + s * s);
  for (int it = 0; it < 3; ++it) {
    double f = bessel_j0(a) - target;
    if (std::abs(f) < 1e-14) break;
    a -= f / (-bessel_j1(a));
  }
  return a;
}

double CorrugationProfile::alpha_rootfind(double s) const {
  check_range(s);
  if (s <= 0.0) return 0.0;
  return solve_closure(s, 0.2);
}

double CorrugationProfile::dalpha_ds(double s) const {
  check_range(s);
  double a = alpha(s);
  if (a < 1e-10) return std::sqrt(2.0);
  return s * std::pow(1.0 + s * s, -1.5) / bessel_j1(a);
}

Gamma2 CorrugationProfile::dt(double s, double t) const {
  check_range(s);
  double a = alpha(s);
  double root = std::sqrt(1.0 + s * s);
  double phase = a * std::sin(t);
  return {root * std::cos(phase) - 1.0, root * std::sin(phase)};
}

Gamma2 CorrugationProfile::dtt(double s, double t) const {
  check_range(s);
  double a = alpha(s);
  double root = std::sqrt(1.0 + s * s);
  double phase = a * std::sin(t);
  double chain = a * std::cos(t);
  return {-root * std::sin(phase) * chain, root * std::cos(phase) * chain};
}

Gamma2 CorrugationProfile::dsdt(double s, double t) const {
  check_range(s);
  double a = alpha(s);
  double da = dalpha_ds(s);
  double root = std::sqrt(1.0 + s * s);
  double droot = s / root;
  double phase = a * std::sin(t);
  double dphase = da * std::sin(t);
  return {droot * std::cos(phase) - root * std::sin(phase) * dphase,
          droot * std::sin(phase) + root * std::cos(phase) * dphase};
}

// Integrates the dt (or dsdt) integrand pair from 0 to t; caller reduces t.
Gamma2 integrate_gamma(const CorrugationProfile& prof, double s, double t, bool s_derivative,
                       double panel_width) {
  double a = prof.alpha(s);
  double root = std::sqrt(1.0 + s * s);
  double da = s_derivative ? prof.dalpha_ds(s) : 0.0;
  double droot = s_derivative ? s / root : 0.0;
  Gamma2 acc;
  double pos = 0.0;
  while (pos < t - 1e-15) {
    double w = std::min(panel_width, t - pos);
    double mid = pos + 0.5 * w, half = 0.5 * w;
    for (int q = 0; q < 8; ++q) {
      double tau = mid + half * kGx[q];
      double wt = half * kGw[q];
      double st = std::sin(tau);
      double phase = a * st;
      double cp = std::cos(phase), sp = std::sin(phase);
      if (!s_derivative) {
        acc.g1 += wt * (root * cp - 1.0);
        acc.g2 += wt * (root * sp);
      } else {
        acc.g1 += wt * (droot * cp - root * sp * da * st);
        acc.g2 += wt * (droot * sp + root * cp * da * st);
      }
    }
    pos += w;
  }
  return acc;
}

Gamma2 CorrugationProfile::eval(double s, double t) const {
  check_range(s);
  if (s <= 0.0) return {0.0, 0.0};
  double r = t - kPeriod * std::floor(t / kPeriod);
  return integrate_gamma(*this, s, r, false, panel_width_);
}

Gamma2 CorrugationProfile::ds(double s, double t) const {
  check_range(s);
  double r = t - kPeriod * std::floor(t / kPeriod);
  return integrate_gamma(*this, s, r, true, panel_width_);
}

ProfileCheck CorrugationProfile::verify(int s_samples, int t_samples) const {
  ProfileCheck out;
  double prev_sup = -1.0;
  for (int i = 0; i < s_samples; ++i) {
    double s = s_max_ * i / (s_samples - 1);
    double sup_dt2 = 0.0;
    for (int j = 0; j < t_samples; ++j) {
      double t = kPeriod * j / t_samples;
      Gamma2 d = dt(s, t);
      double lhs = (1.0 + d.g1) * (1.0 + d.g1) + d.g2 * d.g2;
      out.identity_residual = std::max(out.identity_residual, std::abs(lhs - (1.0 + s * s)));
      sup_dt2 = std::max(sup_dt2, std::abs(d.g2));
    }
    if (sup_dt2 + 1e-12 < prev_sup) out.alpha_monotone = false;
    prev_sup = sup_dt2;
    Gamma2 end = integrate_gamma(*this, s, kPeriod, false, panel_width_);
    out.periodicity_residual =
        std::max(out.periodicity_residual, std::max(std::abs(end.g1), std::abs(end.g2)));
    if (s > 1e-9) out.alpha_over_s_max = std::max(out.alpha_over_s_max, alpha(s) / s);
  }
  return out;
}

void CorrugationProfile::export_table_csv(std::ostream& os) const {
  os << "s,alpha\n";
  for (std::size_t i = 0; i < table_s_.size(); ++i) os << table_s_[i] << "," << table_a_[i] << "\n";
}

}  // namespace ci
