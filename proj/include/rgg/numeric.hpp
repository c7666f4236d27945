#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgg {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Raised when a quadrature or solver fails to reach its requested tolerance.
// The message carries the tolerance actually achieved.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg, double achieved = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(msg), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// log(exp(a) + exp(b)), safe for -inf inputs
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(exp(a) - exp(b)); requires a >= b
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (b > a) throw std::domain_error("log_sub: negative difference");
  if (a == b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

// log(1 - exp(x)) for x <= 0
inline double log1mexp(double x) {
  if (x > 0) throw std::domain_error("log1mexp: x > 0");
  if (x == 0) return kNegInf;
  // crossover at log(2) per Maechler's note
  return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

struct QuadResult {
  double value = 0;
  double abs_error = 0;
  long evals = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1]
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(F&& f, double a, double b, double& kron, double& err, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double kr = fc * kGK15Weights[7];
  double gs = fc * kG7Weights[3];
  for (int i = 0; i < 7; ++i) {
    double x = h * kGK15Nodes[i];
    double f1 = f(c - x);
    double f2 = f(c + x);
    kr += (f1 + f2) * kGK15Weights[i];
    if (i % 2 == 1) gs += (f1 + f2) * kG7Weights[i / 2];
  }
  evals += 15;
  kron = kr * h;
  err = std::abs((kr - gs) * h);
}

template <class F>
inline void gk_adaptive(F&& f, double a, double b, double tol, int depth, int max_depth,
                        QuadResult& acc, double& worst_tol) {
  double kron, err;
  gk15(f, a, b, kron, err, acc.evals);
  if (err <= tol || depth >= max_depth) {
    if (err > tol) worst_tol = std::max(worst_tol, err);
    acc.value += kron;
    acc.abs_error += err;
    return;
  }
  double m = 0.5 * (a + b);
  gk_adaptive(f, a, m, 0.5 * tol, depth + 1, max_depth, acc, worst_tol);
  gk_adaptive(f, m, b, 0.5 * tol, depth + 1, max_depth, acc, worst_tol);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on [a, b]. Throws numeric_error if the requested
// absolute tolerance cannot be met within max_depth bisections.
template <class F>
inline QuadResult integrate(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  QuadResult acc;
  if (a == b) return acc;
  double worst = 0;
  detail::gk_adaptive(f, a, b, abs_tol, 0, max_depth, acc, worst);
  if (worst > 0 && acc.abs_error > abs_tol * 8)
    throw numeric_error("quadrature did not converge; achieved " + std::to_string(acc.abs_error),
                        acc.abs_error);
  return acc;
}

// Safeguarded Newton on a bracketed root: f_df returns {f(x), f'(x)}.
// Falls back to bisection whenever the Newton step leaves the bracket.
template <class FDF>
inline double rtsafe(FDF&& f_df, double lo, double hi, double flo, double fhi,
                     double xtol, int max_iter = 200) {
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("rtsafe: root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    auto [fx, dfx] = f_df(x);
    if (fx == 0) return x;
    if ((fx > 0) == (fhi > 0)) {
      hi = x;
    } else {
      lo = x;
    }
    double step = dfx != 0 ? fx / dfx : kInf;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= xtol) return xn;
    x = xn;
  }
  return x;
}

// Plain bisection for a monotone function; g must change sign on [lo, hi].
template <class G>
inline double bisect(G&& g, double lo, double hi, double xtol, int max_iter = 400) {
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0) return lo;
  if (ghi == 0) return hi;
  if ((glo > 0) == (ghi > 0)) throw std::invalid_argument("bisect: root not bracketed");
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    double m = 0.5 * (lo + hi);
    double gm = g(m);
    if (gm == 0) return m;
    if ((gm > 0) == (ghi > 0)) {
      hi = m;
      ghi = gm;
    } else {
      lo = m;
      glo = gm;
    }
  }
  return 0.5 * (lo + hi);
}

// printf-stable float formatting used by CSV/JSON writers (byte-reproducible runs)
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace rgg
