#pragma once

#include <iosfwd>
#include <vector>

#include "ci/field.hpp"

namespace ci {

struct Gamma2 {
  double g1 = 0.0;
  double g2 = 0.0;
};

struct ProfileCheck {
  double identity_residual = 0.0;     // max |(1+dtG1)^2+(dtG2)^2-(1+s^2)|
  double periodicity_residual = 0.0;  // max |Gamma(s,2pi)-Gamma(s,0)|
  bool alpha_monotone = true;
  double alpha_over_s_max = 0.0;  // measured sup alpha(s)/s
};

/// Kuiper corrugation profile Gamma = (Gamma1, Gamma2)(s, t), 2pi-periodic in
/// t, realized as
///   dtGamma1 = sqrt(1+s^2) cos(alpha(s) sin t) - 1,
///   dtGamma2 = sqrt(1+s^2) sin(alpha(s) sin t),
/// with alpha(s) closing periodicity through J0(alpha) = 1/sqrt(1+s^2).
/// Values are t-integrals by composite Gauss-Legendre quadrature.
class CorrugationProfile {
 public:
  explicit CorrugationProfile(double s_max = 0.4, int table_size = 512, int panels_per_period = 64);

  double s_max() const { return s_max_; }

  /// Table lookup + one Newton polish; |J0(a)*sqrt(1+s^2)-1| <= 1e-12.
  double alpha(double s) const;
  /// Direct bracketed Newton root-find (verification path, no table).
  double alpha_rootfind(double s) const;
  double dalpha_ds(double s) const;

  Gamma2 eval(double s, double t) const;
  Gamma2 dt(double s, double t) const;
  Gamma2 dtt(double s, double t) const;
  Gamma2 ds(double s, double t) const;
  Gamma2 dsdt(double s, double t) const;

  ProfileCheck verify(int s_samples = 50, int t_samples = 200) const;
  void export_table_csv(std::ostream& os) const;

 private:
  void check_range(double s) const;
  double quad_pair(double s, double a, double t, bool second) const;

  double s_max_;
  int panels_;
  double panel_width_;
  std::vector<double> table_s_, table_a_, table_da_;
};

}  // namespace ci
