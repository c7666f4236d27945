#pragma once

#include <cmath>
#include <optional>
#include <tuple>

#include "rgg/numeric.hpp"

// Spherical marginals, cap measures, Gaussian tails and the analytic tail
// bounds used by the samplers and estimators. Everything is computed in log
// domain first so that cap measures around e^{-700} stay representable.

namespace rgg {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Connection thresholds for edge probability p in dimension d:
// t_sphere solves Lambda_d(t) = p, s_gauss solves P(<Z1,Z2>) >= s) = p.
struct Threshold {
  double p = 0;
  int d = 0;
  double t_sphere = 0;
  double s_gauss = 0;
};

struct ModelParams {
  int n = 2;
  int d = 2;
  double p = 0.5;
  std::optional<double> epsilon;  // deviation rate, only for edge-deviation runs

  void validate() const {
    if (n < 2) throw std::invalid_argument("ModelParams: n must be >= 2");
    if (d < 2) throw std::invalid_argument("ModelParams: d must be >= 2");
    if (!(p > 0 && p <= 0.5)) throw std::invalid_argument("ModelParams: p must be in (0, 1/2]");
    if (epsilon) {
      if (!(*epsilon > 0) || (1 + *epsilon) * p >= 1)
        throw std::invalid_argument("ModelParams: need epsilon > 0 and (1+epsilon)p < 1");
    }
  }
};

namespace detail {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 3e-16;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < eps) return h;
  }
  throw numeric_error("beta_cf: continued fraction did not converge");
}

// log I_x(a, b). log_x and log_1mx are passed by the caller because the cap
// parametrization knows them exactly (x = 1-u^2, 1-x = u^2).
inline double log_reg_inc_beta(double a, double b, double x, double log_x, double log_1mx) {
  if (x <= 0) return kNegInf;
  if (x >= 1) return 0;
  const double lpre = -log_beta(a, b) + a * log_x + b * log_1mx;
  if (x < (a + 1) / (a + b + 2)) {
    return lpre - std::log(a) + std::log(beta_cf(a, b, x));
  }
  const double lcomp = lpre - std::log(b) + std::log(beta_cf(b, a, 1 - x));
  return log1mexp(std::min(lcomp, 0.0));
}

}  // namespace detail

// f_d, the density of one coordinate of a uniform point on S^{d-1}:
// Gamma(d/2) / (Gamma((d-1)/2) sqrt(pi)) * (1-x^2)^{(d-3)/2}
inline double log_marginal_density(double x, int d) {
  if (d < 2) throw std::invalid_argument("marginal_density: d must be >= 2");
  if (std::abs(x) >= 1) {
    if (std::abs(x) == 1 && d == 3) return -0.6931471805599453;  // f_3 == 1/2
    if (std::abs(x) == 1 && d > 3) return kNegInf;
    throw std::domain_error("marginal_density: |x| must be < 1");
  }
  return std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1)) - 0.5 * std::log(kPi) +
         0.5 * (d - 3) * (std::log1p(-x) + std::log1p(x));
}

inline double marginal_density(double x, int d) { return std::exp(log_marginal_density(x, d)); }

// log Lambda_d(u) = log integral_u^1 f_d. Closed forms for d = 2, 3; the
// regularized incomplete beta of x = 1-u^2 otherwise (X_1^2 ~ Beta(1/2,(d-1)/2)).
inline double log_sphere_tail(double u, int d) {
  if (d < 2) throw std::invalid_argument("sphere_tail: d must be >= 2");
  if (u < -1 || u > 1) throw std::domain_error("sphere_tail: u must be in [-1,1]");
  if (u >= 1) return kNegInf;
  if (u <= -1) return 0;
  if (d == 2) return std::log(std::acos(u)) - std::log(kPi);
  if (d == 3) return std::log1p(-u) - 0.6931471805599453;
  if (u == 0) return -0.6931471805599453;
  if (u > 0) {
    const double x = (1 - u) * (1 + u);
    const double log_x = std::log1p(-u) + std::log1p(u);
    const double log_1mx = 2 * std::log(u);
    return -0.6931471805599453 +
           detail::log_reg_inc_beta(0.5 * (d - 1), 0.5, x, log_x, log_1mx);
  }
  return log1mexp(log_sphere_tail(-u, d));
}

inline double sphere_tail(double u, int d) { return std::exp(log_sphere_tail(u, d)); }

// h(a) = Lambda_d^{-1}(a), the altitude of the cap of measure a.
inline double sphere_tail_inverse(double a, int d) {
  if (d < 2) throw std::invalid_argument("sphere_tail_inverse: d must be >= 2");
  if (a < 0 || a > 1) throw std::domain_error("sphere_tail_inverse: a must be in [0,1]");
  if (a == 0) return 1;
  if (a == 1) return -1;
  if (a == 0.5) return 0;
  if (d == 2) return std::cos(kPi * a);
  if (d == 3) return 1 - 2 * a;
  if (a > 0.5) return -sphere_tail_inverse(1 - a, d);
  // solve log Lambda(u) = log a on (0, 1); log-scale Newton keeps the problem
  // well conditioned down to subnormal a
  const double la = std::log(a);
  auto f_df = [&](double u) {
    const double lt = log_sphere_tail(u, d);
    const double dlt = -std::exp(log_marginal_density(u, d) - lt);
    return std::pair<double, double>(lt - la, dlt);
  };
  const double hi = 1 - 1e-16;
  return rtsafe(f_df, 0.0, hi, -0.6931471805599453 - la, f_df(hi).first, 1e-15);
}

// Gaussian upper tail and its inverse.
inline double gauss_tail(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244); }

inline double log_gauss_tail(double x) {
  if (x < 30) return std::log(gauss_tail(x));
  // asymptotic expansion; relative error < 1e-12 for x >= 30
  const double x2 = x * x;
  const double series = 1 - 1 / x2 + 3 / (x2 * x2) - 15 / (x2 * x2 * x2);
  return -0.5 * x2 - 0.5 * std::log(2 * kPi) - std::log(x) + std::log(series);
}

inline double gauss_tail_inverse(double p) {
  if (!(p > 0 && p < 1)) throw std::domain_error("gauss_tail_inverse: p must be in (0,1)");
  if (p == 0.5) return 0;
  if (p > 0.5) return -gauss_tail_inverse(1 - p);
  // Abramowitz-Stegun 26.2.23 start, then Newton on log scale
  const double t = std::sqrt(-2 * std::log(p));
  double x = t - (2.30753 + 0.27061 * t) / (1 + 0.99229 * t + 0.04481 * t * t);
  const double lp = std::log(p);
  for (int it = 0; it < 60; ++it) {
    const double lt = log_gauss_tail(x);
    const double lphi = -0.5 * x * x - 0.91893853320467274178;  // log pdf
    const double step = (lt - lp) * std::exp(lt - lphi);
    x += step;
    if (std::abs(step) < 1e-14 * (1 + std::abs(x))) break;
  }
  return x;
}

namespace detail {

inline double log_chi_pdf(double r, int d) {
  return (1 - 0.5 * d) * 0.6931471805599453 + (d - 1) * std::log(r) - 0.5 * r * r -
         std::lgamma(0.5 * d);
}

// P(<Z1,Z2> >= s) = E_{R~chi(d)} Phi_bar(s/R); the chi mass lives in
// sqrt(d) +- O(1) so a fixed window suffices.
inline double gauss_inner_tail(double s, int d, double tol = 1e-12) {
  const double c = std::sqrt(static_cast<double>(d));
  const double lo = std::max(1e-12, c - 14);
  const double hi = c + 14;
  auto f = [&](double r) { return std::exp(log_chi_pdf(r, d)) * gauss_tail(s / r); };
  return integrate(f, lo, hi, tol).value;
}

}  // namespace detail

inline double gauss_inner_tail(double s, int d, double tol = 1e-12) {
  return detail::gauss_inner_tail(s, d, tol);
}

// s_{p,d}: the Gaussian-model connection threshold, solved against the
// chi-mixture tail by bracketed bisection. Accepts p in (0,1); values above
// 1/2 resolve through the symmetry s_{1-p} = -s_p.
inline double gauss_inner_threshold(double p, int d) {
  if (d < 2) throw std::invalid_argument("gauss_inner_threshold: d must be >= 2");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("gauss_inner_threshold: p must be in (0,1)");
  if (p == 0.5) return 0;
  if (p > 0.5) return -gauss_inner_threshold(1 - p, d);
  const double c = std::sqrt(static_cast<double>(d));
  double hi = (gauss_tail_inverse(p) + 1) * c + 4;
  while (detail::gauss_inner_tail(hi, d) >= p) hi *= 1.5;
  auto g = [&](double s) { return detail::gauss_inner_tail(s, d) - p; };
  return bisect(g, 0.0, hi, 1e-11 * (1 + hi));
}

inline Threshold solve_threshold(double p, int d) {
  if (d < 2) throw std::invalid_argument("solve_threshold: d must be >= 2");
  if (!(p > 0 && p <= 0.5)) throw std::invalid_argument("solve_threshold: p must be in (0, 1/2]");
  Threshold th;
  th.p = p;
  th.d = d;
  if (p == 0.5) return th;  // exact zeros by symmetry
  th.t_sphere = sphere_tail_inverse(p, d);
  th.s_gauss = gauss_inner_threshold(p, d);
  return th;
}

// Density of the first two coordinates of a uniform point on S^{d-1}:
// (d-2)/(2 pi) (1 - x^2 - y^2)^{(d-4)/2}. d = 3 is allowed; the boundary
// singularity is integrable.
inline double log_joint_density_2d(double x, double y, int d) {
  if (d < 3) throw std::invalid_argument("joint_density_2d: d must be >= 3");
  const double r2 = x * x + y * y;
  if (r2 >= 1) throw std::domain_error("joint_density_2d: x^2 + y^2 must be < 1");
  return std::log(d - 2.0) - std::log(2 * kPi) + 0.5 * (d - 4) * std::log1p(-r2);
}

inline double joint_density_2d(double x, double y, int d) {
  return std::exp(log_joint_density_2d(x, y, d));
}

// mu(C1 cap C2) for caps of measures a, b whose centers have inner product u.
// The 2-d integral of the joint density over {x >= h(a), ux + sqrt(1-u^2) y >= h(b)}
// reduces to a 1-d integral: the inner y-integral over a slice is the
// (d-1)-dimensional tail at altitude (h(b) - ux)/(sqrt(1-u^2) sqrt(1-x^2)).
inline double cap_intersection_measure(double a, double b, double u, int d,
                                       double abs_tol = 1e-9) {
  if (d < 2) throw std::invalid_argument("cap_intersection_measure: d must be >= 2");
  if (a < 0 || a > 1 || b < 0 || b > 1)
    throw std::domain_error("cap_intersection_measure: cap measures must be in [0,1]");
  if (u < -1 || u > 1) throw std::domain_error("cap_intersection_measure: u must be in [-1,1]");
  if (a == 0 || b == 0) return 0;
  if (a == 1) return b;
  if (b == 1) return a;
  const double lo_bound = std::max(0.0, a + b - 1);
  const double hi_bound = std::min(a, b);
  if (u >= 1 - 1e-14) return hi_bound;    // concentric
  if (u <= -1 + 1e-14) return lo_bound;   // antipodal

  if (d == 2) {
    // circle arcs: half-widths pi*a, pi*b, centers at angle 0 and acos(u)
    const double t = std::acos(u);
    const double lo1 = -kPi * a, hi1 = kPi * a;
    double len = 0;
    for (double shift : {-2 * kPi, 0.0, 2 * kPi}) {
      const double lo2 = t - kPi * b + shift, hi2 = t + kPi * b + shift;
      len += std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
    }
    return std::clamp(len / (2 * kPi), lo_bound, hi_bound);
  }

  const double ha = sphere_tail_inverse(a, d);
  const double hb = sphere_tail_inverse(b, d);
  const double su = std::sqrt((1 - u) * (1 + u));
  auto slice_alt = [&](double x) {
    return (hb - u * x) / (su * std::sqrt((1 - x) * (1 + x)));
  };
  // x where the slice altitude crosses +-1; outside [xm, xp] the slice is
  // entirely inside or outside the second cap
  const double disc = su * std::sqrt(std::max(0.0, (1 - hb) * (1 + hb)));
  const double xm = u * hb - disc, xp = u * hb + disc;
  double cuts[4] = {ha, std::clamp(xm, ha, 1.0), std::clamp(xp, ha, 1.0), 1.0};
  std::sort(cuts, cuts + 4);

  double total = 0;
  for (int k = 0; k < 3; ++k) {
    const double l = cuts[k], r = cuts[k + 1];
    if (r - l < 1e-300) continue;
    const double zmid = slice_alt(0.5 * (l + r));
    if (zmid >= 1) continue;  // slice misses the second cap
    if (zmid <= -1) {
      total += sphere_tail(l, d) - sphere_tail(r, d);  // slice fully inside
      continue;
    }
    auto f = [&](double x) {
      const double z = std::clamp(slice_alt(x), -1.0, 1.0);
      return std::exp(log_marginal_density(x, d) + log_sphere_tail(z, d - 1));
    };
    total += integrate(f, l, r, abs_tol / 3).value;
  }
  return std::clamp(total, lo_bound, hi_bound);
}

// Two-sided Sodin envelope for Lambda_d(t) plus the t = O(d^{-1/4}) proxy
// exp(-d t^2 / 2) / (sqrt(d) t). The constants C1, C2 are caller-supplied;
// the asymptotic is undefined at t = 0 and flagged as such.
struct SodinBounds {
  double log_lower = 0;
  double log_upper = 0;
  double log_asymptotic = 0;
  bool asymptotic_valid = false;
  double lower() const { return std::exp(log_lower); }
  double upper() const { return std::exp(log_upper); }
  double asymptotic() const { return std::exp(log_asymptotic); }
};

inline SodinBounds sodin_bounds(double t, int d, double c1, double c2) {
  if (t < 0) throw std::domain_error("sodin_bounds: t must be >= 0");
  SodinBounds out;
  const double lg = log_gauss_tail(std::sqrt(static_cast<double>(d)) * t);
  const double t4 = t * t * t * t;
  out.log_lower = lg - c1 * d * t4;
  out.log_upper = lg - c2 * d * t4;
  if (t > 0) {
    out.log_asymptotic = -0.5 * d * t * t - 0.5 * std::log(static_cast<double>(d)) - std::log(t);
    out.asymptotic_valid = true;
  } else {
    out.log_asymptotic = kNaN;
  }
  return out;
}

// min(1, 2 exp(-c2 min(t^2/(n^2 d), t/n)))
inline double bernstein_tail_bound(double t, int n, int d, double c2) {
  if (t < 0) throw std::domain_error("bernstein_tail_bound: t must be >= 0");
  if (c2 <= 0) throw std::invalid_argument("bernstein_tail_bound: c2 must be > 0");
  const double nn = static_cast<double>(n);
  const double rate = std::min(t * t / (nn * nn * d), t / nn);
  return std::min(1.0, 2 * std::exp(-c2 * rate));
}

}  // namespace rgg
