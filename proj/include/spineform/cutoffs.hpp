#pragma once

// C^2 cutoff profiles used by the collar and annulus forms. All pieces are
// built from the quintic smoothstep so values and derivatives are analytic.

#include <cmath>
#include <stdexcept>

namespace spineform {

namespace detail {
inline double smoothstep5(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
inline double smoothstep5_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  double v = u * (1.0 - u);
  return 30.0 * v * v;
}
}  // namespace detail

// 0 below a, 1 above b.
struct StepUp {
  double a = 0.0, b = 1.0;
  double operator()(double x) const { return detail::smoothstep5((x - a) / (b - a)); }
  double deriv(double x) const { return detail::smoothstep5_d((x - a) / (b - a)) / (b - a); }
};

// 1 below a, 0 above b.
struct StepDown {
  double a = 0.0, b = 1.0;
  double operator()(double x) const { return 1.0 - detail::smoothstep5((x - a) / (b - a)); }
  double deriv(double x) const { return -detail::smoothstep5_d((x - a) / (b - a)) / (b - a); }
};

// 0 outside [a0,b0], 1 on [a1,b1].
struct Plateau {
  double a0, a1, b1, b0;
  double operator()(double x) const {
    return detail::smoothstep5((x - a0) / (a1 - a0)) *
           (1.0 - detail::smoothstep5((x - b1) / (b0 - b1)));
  }
  double deriv(double x) const {
    double u = detail::smoothstep5((x - a0) / (a1 - a0));
    double du = detail::smoothstep5_d((x - a0) / (a1 - a0)) / (a1 - a0);
    double v = 1.0 - detail::smoothstep5((x - b1) / (b0 - b1));
    double dv = -detail::smoothstep5_d((x - b1) / (b0 - b1)) / (b0 - b1);
    return du * v + u * dv;
  }
};

// Collar damping profile: 1 - s for s <= 2*eps, identically 0 from 3*eps on,
// strictly decreasing in between. The constraints force it to vanish on
// [3*eps, 4*eps].
struct CollarPhi {
  double eps;
  StepDown gate{0.0, 1.0};
  explicit CollarPhi(double e) : eps(e), gate{2.0 * e, 3.0 * e} {}
  double operator()(double s) const { return (1.0 - s) * gate(s); }
  double deriv(double s) const { return -gate(s) + (1.0 - s) * gate.deriv(s); }
};

// Ramp 0 -> 1 over [3*eps, 5*eps]; vanishes below 2*eps as required.
struct PsiQ {
  double eps;
  StepUp ramp{0.0, 1.0};
  explicit PsiQ(double e) : eps(e), ramp{3.0 * e, 5.0 * e} {}
  double operator()(double s) const { return ramp(s); }
  double deriv(double s) const { return ramp.deriv(s); }
};

// Annulus depth profile: 0 below eps, -1 on [2*eps, 1-delta], back to 0 above
// 1+delta. Its derivative is <= 0 on [eps,2*eps] and > 0 on (1-delta,1+delta),
// which is the sign pattern the transverse-annulus forms need.
struct AnnulusPhi2 {
  Plateau plat;
  AnnulusPhi2(double eps, double delta) : plat{eps, 2.0 * eps, 1.0 - delta, 1.0 + delta} {}
  double operator()(double s) const { return -plat(s); }
  double deriv(double s) const { return -plat.deriv(s); }
};

// Transverse bump on [-delta, delta], flat top 1 on [-delta/2, delta/2].
struct AnnulusPhi1 {
  Plateau plat;
  explicit AnnulusPhi1(double delta) : plat{-delta, -delta / 2.0, delta / 2.0, delta} {}
  double operator()(double u) const { return plat(u); }
  double deriv(double u) const { return plat.deriv(u); }
};

// Radial cutoff in the squared radius R: 1 for R <= R1, 0 for R >= R2.
struct RadialCutoff {
  StepDown gate;
  RadialCutoff(double r1, double r2) : gate{r1, r2} {}
  double operator()(double R) const { return gate(R); }
  double deriv(double R) const { return gate.deriv(R); }
};

// In-chart ramp for the transversal-strip density near a zero: 0 for
// R <= 0.8*R0, 1 for R >= R0.
struct ChartStripRamp {
  StepUp gate;
  explicit ChartStripRamp(double r0) : gate{0.8 * r0, r0} {}
  double operator()(double R) const { return gate(R); }
  double deriv(double R) const { return gate.deriv(R); }
};

}  // namespace spineform
