#pragma once

// Spreading speed c* as the smallest speed at which the road curve Psi_1 and the
// field curve Psi_2 meet.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roadspeed/bvp.hpp"
#include "roadspeed/dispersion.hpp"
#include "roadspeed/error.hpp"
#include "roadspeed/model.hpp"

namespace roadspeed {

enum class SpeedRegime { subcritical_D_le_2d, computed };

inline std::string_view to_string(SpeedRegime r) {
  return r == SpeedRegime::subcritical_D_le_2d ? "subcritical_D_le_2d" : "computed";
}

struct SpeedResult {
  double c_star = 0.0;
  std::optional<double> lambda_star;
  SpeedRegime regime = SpeedRegime::computed;
  double gap_at_cstar = 0.0;
  int iterations = 0;
  std::pair<double, double> bracket{0.0, 0.0};
};

/// Settings of the c* search. The profile grid is sized once for the whole bracket.
struct SpeedSearchConfig {
  GridConfig grid;
  std::size_t scan_points = 129;      // Chebyshev-Lobatto nodes on I(c)
  double lambda_tol = 1e-10;          // golden-section width in lambda
  double c_tol = 1e-8;                // final bisection width in c
  double endpoint_margin = 1e-6;      // delta_min as a fraction of lambda_2^+ - lambda_2^-
  double gap_tol_rel = 1e-4;          // |G(c*)| <= gap_tol_rel * mu_bar
};

/// Max of Psi_1 - Psi_2 over I(c) and where it is attained.
struct GapEvaluation {
  double value = 0.0;
  std::optional<double> argmax;   // empty when I(c) is empty
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

/// Admissible lambda window I(c) = [lambda_2^- + delta, min(lambda_1^+, lambda_2^+) - delta].
inline std::pair<double, double> gap_interval(double c, const ModelParams& p, double endpoint_margin) {
  const auto [l2m, l2p] = lambda2_pm(c, p);
  const double l1p = lambda1_pm(c, p).plus;
  const double delta = endpoint_margin * (l2p - l2m);
  return {l2m + delta, std::min(l1p, l2p) - delta};
}

namespace detail {

/// Golden-section maximisation of a unimodal function on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace detail

/// G(c) = max over I(c) of Psi_1 - Psi_2. G(c) >= 0 iff the curves meet.
/// Returns -10 mu_bar when I(c) is empty (lambda_1^+ <= lambda_2^-).
inline GapEvaluation intersection_gap(double c, const PhiSolver& solver, const SpeedSearchConfig& cfg = {}) {
  const ModelParams& p = solver.params();
  if (!(c > p.c_kpp()))
    throw Error(ErrorKind::subcritical_speed, "speedfinder.intersection_gap", "requires c > c_K");
  GapEvaluation out;
  const auto [lo, hi] = gap_interval(c, p, cfg.endpoint_margin);
  out.interval_lo = lo;
  out.interval_hi = hi;
  if (!(hi > lo)) {
    out.value = -10.0 * p.mu_bar;
    return out;
  }
  auto F = [&](double lambda) { return psi1(lambda, c, p) - solver.psi2(lambda, c); };

  const std::size_t m = std::max<std::size_t>(cfg.scan_points, 3);
  std::vector<double> nodes(m);
  const double mid = 0.5 * (lo + hi);
  const double rad = 0.5 * (hi - lo);
  for (std::size_t k = 0; k < m; ++k)
    nodes[k] = mid - rad * std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(m - 1));
  nodes.front() = lo;
  nodes.back() = hi;

  std::size_t best = 0;
  double best_val = F(nodes[0]);
  for (std::size_t k = 1; k < m; ++k) {
    const double v = F(nodes[k]);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a = nodes[best == 0 ? 0 : best - 1];
  const double b = nodes[best + 1 == m ? m - 1 : best + 1];
  const auto [x_ref, f_ref] = detail::golden_max(F, a, b, cfg.lambda_tol);
  if (f_ref > best_val) {
    out.value = f_ref;
    out.argmax = x_ref;
  } else {
    out.value = best_val;
    out.argmax = nodes[best];
  }
  return out;
}

/// Profile grid for the search bracket [c_K, c_max].
inline PhiSolver make_gap_solver(const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu, double c_max,
                                 const GridConfig& grid = {}) {
  const GridSize g = make_phi_grid(p, mu, nu, c_max, grid);
  return PhiSolver(p, mu, nu, g.L, g.n);
}

inline double search_upper_speed(const ModelParams& p) { return 1.05 * upper_bound_speed(p); }

/// Bisection on the sign of G between c_K (1 + 1e-9) and 1.05 times the upper bound.
/// For D <= 2d the road does not accelerate the front and c* = c_K.
inline SpeedResult find_cstar(const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu,
                              const SpeedSearchConfig& cfg = {}) {
  p.validate();
  mu.validate();
  nu.validate();
  SpeedResult res;
  const double cK = p.c_kpp();
  if (p.D <= 2.0 * p.d) {
    res.c_star = cK;
    res.regime = SpeedRegime::subcritical_D_le_2d;
    res.bracket = {cK, cK};
    return res;
  }
  double lo = cK * (1.0 + 1e-9);
  double hi = search_upper_speed(p);
  const PhiSolver solver = make_gap_solver(p, mu, nu, hi, cfg.grid);

  const GapEvaluation g_lo = intersection_gap(lo, solver, cfg);
  if (g_lo.value >= 0.0)
    throw Error(ErrorKind::bracket_failure, "speedfinder.find_cstar",
                "G(c_K+) = " + std::to_string(g_lo.value) + " is nonnegative; refine the profile grid");
  const GapEvaluation g_hi = intersection_gap(hi, solver, cfg);
  if (g_hi.value < 0.0)
    throw Error(ErrorKind::bracket_failure, "speedfinder.find_cstar",
                "G(1.05 c_upper) = " + std::to_string(g_hi.value) + " is negative; refine the profile grid");
  res.bracket = {lo, hi};

  int it = 0;
  while (hi - lo > cfg.c_tol) {
    const double mid = 0.5 * (lo + hi);
    if (intersection_gap(mid, solver, cfg).value < 0.0)
      lo = mid;
    else
      hi = mid;
    ++it;
  }
  res.c_star = 0.5 * (lo + hi);
  res.iterations = it;
  res.regime = SpeedRegime::computed;
  const GapEvaluation g = intersection_gap(res.c_star, solver, cfg);
  res.gap_at_cstar = g.value;
  res.lambda_star = g.argmax;
  return res;
}

/// Samples of (lambda, Psi_1, Psi_2) across I(c), for plotting and sign-change scans.
struct CurveSample {
  double lambda;
  double psi1;
  double psi2;
};

inline std::vector<CurveSample> sample_curves(double c, const PhiSolver& solver, std::size_t points,
                                              double endpoint_margin = 1e-6) {
  const ModelParams& p = solver.params();
  const auto [l2m, l2p] = lambda2_pm(c, p);
  const double delta = endpoint_margin * (l2p - l2m);
  const double lo = l2m + delta;
  const double hi = l2p - delta;
  std::vector<CurveSample> out;
  if (!(hi > lo) || points < 2) return out;
  out.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double lambda = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    out.push_back({lambda, psi1(lambda, c, p), solver.psi2(lambda, c)});
  }
  return out;
}

/// Number of sign changes of Psi_1 - Psi_2 along a lambda scan of I(c).
inline int count_gap_sign_changes(double c, const PhiSolver& solver, std::size_t points,
                                  double endpoint_margin = 1e-6) {
  const ModelParams& p = solver.params();
  const auto [lo, hi] = gap_interval(c, p, endpoint_margin);
  if (!(hi > lo)) return 0;
  int changes = 0;
  int prev = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const double lambda = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    const double v = psi1(lambda, c, p) - solver.psi2(lambda, c);
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s != 0) {
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
  }
  return changes;
}

}  // namespace roadspeed
