#pragma once

// Closed-form pieces of the dispersion analysis for linear traveling waves
// (u, v) = e^{-lambda (x - c t)} (1, phi(y)).

#include <cmath>
#include <utility>

#include "roadspeed/error.hpp"
#include "roadspeed/model.hpp"

namespace roadspeed {

/// A candidate (speed, decay rate) pair; both strictly positive.
struct DispersionPoint {
  double c;
  double lambda;

  DispersionPoint(double c_, double lambda_) : c(c_), lambda(lambda_) {
    if (!(c > 0.0) || !(lambda > 0.0))
      throw Error(ErrorKind::invalid_parameter, "dispersion.DispersionPoint", "c and lambda must both be > 0");
  }
};

struct RootPair {
  double minus;
  double plus;
};

inline double c_kpp(const ModelParams& p) { return p.c_kpp(); }

/// Road curve Psi_1(lambda, c) = -D lambda^2 + lambda c + mu_bar.
inline double psi1(double lambda, double c, const ModelParams& p) {
  return -p.D * lambda * lambda + lambda * c + p.mu_bar;
}

/// Roots of Psi_1 in lambda. The smaller root is recovered from the product
/// -mu_bar/D to avoid cancellation.
inline RootPair lambda1_pm(double c, const ModelParams& p) {
  const double plus = (c + std::sqrt(c * c + 4.0 * p.D * p.mu_bar)) / (2.0 * p.D);
  return {-p.mu_bar / (p.D * plus), plus};
}

/// Endpoints of the interval where P(lambda) > 0. Requires c >= c_K.
inline RootPair lambda2_pm(double c, const ModelParams& p) {
  const double cK = p.c_kpp();
  if (!(c >= cK))
    throw Error(ErrorKind::subcritical_speed, "dispersion.lambda2_pm", "speed below c_K has no real endpoints");
  const double disc = std::sqrt((c - cK) * (c + cK));
  const double plus = (c + disc) / (2.0 * p.d);
  // product of the roots of d l^2 - c l + a is a/d
  return {(p.a / p.d) / plus, plus};
}

/// P(lambda) = lambda c - d lambda^2 - f'(0), the zeroth-order coefficient of the phi equation.
inline double p_coeff(double lambda, double c, const ModelParams& p) {
  return lambda * c - p.d * lambda * lambda - p.a;
}

/// D = d (2 + mu_bar / f'(0)): above it lambda_1^+(c_K) < lambda_2^-(c_K).
inline double threshold_D(const ModelParams& p) { return p.d * (2.0 + p.mu_bar / p.a); }

/// D sqrt(a / (D - d)), an upper bound on c* over all admissible kernels.
inline double upper_bound_speed(const ModelParams& p) {
  if (!(p.D > p.d))
    throw Error(ErrorKind::invalid_parameter, "dispersion.upper_bound_speed", "bound requires D > d");
  return p.D * std::sqrt(p.a / (p.D - p.d));
}

namespace detail {

/// Bisection for an increasing function with f(lo) < 0 <= f(hi). Stops at width <= tol
/// or when the midpoint can no longer be separated from the endpoints.
template <class F>
double bisect_increasing(F&& f, double lo, double hi, double tol, int* iterations = nullptr) {
  int it = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    ++it;
  }
  if (iterations) *iterations = it;
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// lambda_1^+(c) - lambda_2^-(c): increasing in c on [c_K, inf).
inline double crossing_gap(double c, const ModelParams& p) {
  return lambda1_pm(c, p).plus - lambda2_pm(c, p).minus;
}

/// Speed where lambda_1^+(c) = lambda_2^-(c); the infimum of c* over long-range
/// exchanges when D exceeds threshold_D.
inline double c_min_crossing(const ModelParams& p) {
  if (!(p.D > threshold_D(p)))
    throw Error(ErrorKind::below_threshold, "dispersion.c_min_crossing",
                "D <= threshold_D, the crossing is at or below c_K");
  const double lo = p.c_kpp();
  const double hi = upper_bound_speed(p) + 1.0;
  return detail::bisect_increasing([&](double c) { return crossing_gap(c, p); }, lo, hi, 1e-12);
}

}  // namespace roadspeed
