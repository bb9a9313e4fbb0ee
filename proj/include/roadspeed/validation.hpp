#pragma once

// Invariant suite run by `roadspeed validate`: randomized property checks over the
// closed-form dispersion quantities, the profile solver and the speed search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "roadspeed/asymptotics.hpp"
#include "roadspeed/bvp.hpp"
#include "roadspeed/dispersion.hpp"
#include "roadspeed/model.hpp"
#include "roadspeed/speedfinder.hpp"

namespace roadspeed {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckOutcome> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  ModelParams p;
  p.d = u(rng);
  p.a = u(rng);
  p.mu_bar = u(rng);
  p.nu_bar = u(rng);
  p.D = p.d * std::uniform_real_distribution<double>(1.1, 12.0)(rng);
  return p;
}

}  // namespace detail

/// Runs the invariant suite. Random draws come from `seed`; the configured problem
/// (p, mu, nu) drives the kernel-dependent checks.
inline ValidationReport run_validation(const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu,
                                       std::uint64_t seed, const SpeedSearchConfig& search = {}) {
  ValidationReport rep;
  std::mt19937_64 rng(seed);
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  {  // roots of Psi_1
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const ModelParams q = detail::random_params(rng);
      const double c = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
      const auto r = lambda1_pm(c, q);
      const double scale = std::max(1.0, q.mu_bar);
      worst = std::max({worst, std::abs(psi1(r.plus, c, q)) / scale, std::abs(psi1(r.minus, c, q)) / scale});
    }
    add("dispersion.lambda1_pm root identity", worst <= 1e-12, "max |Psi_1(root)| / max(1,mu_bar) = " + detail::fmt_double(worst));
  }
  {  // sign of P
    bool ok = true;
    for (int k = 0; k < 100 && ok; ++k) {
      const ModelParams q = detail::random_params(rng);
      const double c = q.c_kpp() * std::uniform_real_distribution<double>(1.01, 3.0)(rng);
      const auto [lo, hi] = lambda2_pm(c, q);
      for (int i = 1; i < 100; ++i) {
        const double inside = lo + (hi - lo) * i / 100.0;
        const double outside = i % 2 ? lo - (hi - lo) * i / 100.0 : hi + (hi - lo) * i / 100.0;
        if (!(p_coeff(inside, c, q) > 0.0) || !(p_coeff(outside, c, q) < 0.0)) ok = false;
      }
    }
    add("dispersion.p_coeff sign", ok, "P > 0 inside (lambda_2^-, lambda_2^+), < 0 outside");
  }
  {  // monotonicity in c and D
    bool ok = true;
    for (int k = 0; k < 20 && ok; ++k) {
      const ModelParams q = detail::random_params(rng);
      const double cK = q.c_kpp();
      for (int i = 0; i < 50; ++i) {
        const double c0 = cK * (1.0 + 0.05 * i);
        const double c1 = c0 + 0.01 * cK;
        if (!(lambda1_pm(c1, q).plus > lambda1_pm(c0, q).plus)) ok = false;
        if (!(lambda2_pm(c1, q).minus < lambda2_pm(c0, q).minus)) ok = false;
        ModelParams q2 = q;
        q2.D *= 1.5;
        if (!(lambda1_pm(c0, q).plus > lambda1_pm(c0, q2).plus)) ok = false;
      }
    }
    add("dispersion monotonicity", ok, "lambda_1^+ up and lambda_2^- down in c; lambda_1^+ down in D");
  }
  {  // threshold sign flip and c_min ordering
    bool ok = true;
    for (int k = 0; k < 50 && ok; ++k) {
      ModelParams q = detail::random_params(rng);
      const double t = threshold_D(q);
      const double cK = q.c_kpp();
      q.D = t * (1.0 - 1e-6);
      const double below = lambda1_pm(cK, q).plus - lambda2_pm(cK, q).minus;
      q.D = t * (1.0 + 1e-6);
      const double above = lambda1_pm(cK, q).plus - lambda2_pm(cK, q).minus;
      if (!(below > 0.0 && above < 0.0)) ok = false;
      q.D = t * std::uniform_real_distribution<double>(1.01, 4.0)(rng);
      const double cm = c_min_crossing(q);
      if (!(cm > cK && cm <= upper_bound_speed(q))) ok = false;
      if (!(std::abs(crossing_gap(cm, q)) <= 1e-10)) ok = false;
    }
    add("dispersion.threshold_D / c_min_crossing", ok, "sign flip across threshold; c_K < c_min <= c_upper");
  }
  {  // box oracle
    double worst_phi = 0.0, worst_psi = 0.0;
    for (int k = 0; k < 5; ++k) {
      ModelParams q;
      q.d = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      q.a = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      const double c = q.c_kpp() * std::uniform_real_distribution<double>(1.1, 1.6)(rng);
      const auto [lo, hi] = lambda2_pm(c, q);
      const double lambda = lo + (hi - lo) * std::uniform_real_distribution<double>(0.2, 0.8)(rng);
      const double aw = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
      const double m = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
      const double nh = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
      q.mu_bar = 2 * aw * m;
      q.nu_bar = 2 * aw * nh;
      const double kappa = std::sqrt(p_coeff(lambda, c, q) / q.d);
      const double h = aw / std::ceil(aw / 1e-3);
      const double half = std::ceil((aw + 12.0 / kappa) / h);
      const std::size_t n = static_cast<std::size_t>(2 * half) + 1;
      const auto num = solve_phi(lambda, c, q, ExchangeSpec::make(KernelShape::box, aw, q.mu_bar),
                                 ExchangeSpec::make(KernelShape::box, aw, q.nu_bar), half * h, n);
      const auto ref = box_oracle_phi(lambda, c, q, m, nh, aw, half * h, n);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(num.phi[i] - ref.phi[i]));
      worst_phi = std::max(worst_phi, err / ref.phi.max_abs());
      worst_psi = std::max(worst_psi, std::abs(num.psi2 - ref.psi2) / ref.psi2);
    }
    add("bvp.solve_phi vs box_oracle_phi", worst_phi <= 1e-5 && worst_psi <= 1e-6,
        "max rel phi error " + detail::fmt_double(worst_phi) + ", Psi_2 error " + detail::fmt_double(worst_psi));
  }

  if (p.D > p.d) {
    const double c_up = upper_bound_speed(p);
    const double c = 0.5 * (p.c_kpp() + c_up) > p.c_kpp() ? 0.5 * (p.c_kpp() + c_up) : p.c_kpp() * 1.1;
    const GridSize g = make_phi_grid(p, mu, nu, c, search.grid);
    const PhiSolver solver(p, mu, nu, g.L, g.n);
    const auto [lo, hi] = lambda2_pm(c, p);
    {  // nonnegativity, evenness
      bool ok = true;
      double worst_odd = 0.0;
      for (int i = 1; i < 10; ++i) {
        const auto s = solver.solve(lo + (hi - lo) * i / 10.0, c);
        const double mx = s.phi.max_abs();
        for (std::size_t j = 0; j < s.phi.size(); ++j) {
          if (s.phi[j] < -1e-12 * mx) ok = false;
          worst_odd = std::max(worst_odd, std::abs(s.phi[j] - s.phi[s.phi.size() - 1 - j]) / mx);
        }
      }
      add("bvp nonnegativity and evenness", ok && worst_odd <= 1e-12,
          "max |phi(y) - phi(-y)| / max phi = " + detail::fmt_double(worst_odd));
    }
    {  // Psi_2 convex and symmetric
      std::vector<double> vals(41);
      const double margin = 1e-3 * (hi - lo);
      for (int i = 0; i < 41; ++i) vals[i] = solver.psi2(lo + margin + (hi - lo - 2 * margin) * i / 40.0, c);
      double min_second = 1e300, worst_sym = 0.0;
      for (int i = 1; i < 40; ++i) min_second = std::min(min_second, vals[i - 1] - 2 * vals[i] + vals[i + 1]);
      for (int i = 0; i < 41; ++i) worst_sym = std::max(worst_sym, std::abs(vals[i] - vals[40 - i]));
      add("bvp Psi_2 convexity and symmetry",
          min_second >= -1e-8 * p.mu_bar && worst_sym <= 1e-8 * p.mu_bar,
          "min second difference " + detail::fmt_double(min_second) + ", asymmetry " + detail::fmt_double(worst_sym));
    }
  }

  if (p.D > 2.0 * p.d) {
    const SpeedResult r = find_cstar(p, mu, nu, search);
    const double cK = p.c_kpp();
    const double c_up = upper_bound_speed(p);
    add("speedfinder bound chain", r.c_star > cK && r.c_star <= c_up + 1e-9,
        "c_K = " + detail::fmt_double(cK) + " < c* = " + detail::fmt_double(r.c_star) + " <= " + detail::fmt_double(c_up));
    add("speedfinder gap at c*", std::abs(r.gap_at_cstar) <= search.gap_tol_rel * p.mu_bar,
        "|G(c*)| = " + detail::fmt_double(std::abs(r.gap_at_cstar)));
    if (p.D > threshold_D(p)) {
      const double cm = c_min_crossing(p);
      add("asymptotics lower barrier", r.c_star > cm - 1e-9,
          "c* = " + detail::fmt_double(r.c_star) + " > c_min = " + detail::fmt_double(cm));
    }
  } else {
    const SpeedResult r = find_cstar(p, mu, nu, search);
    add("speedfinder subcritical shortcut", r.c_star == p.c_kpp() && r.regime == SpeedRegime::subcritical_D_le_2d,
        "D <= 2d gives c* = c_K");
  }

  {  // kernels
    bool ok = true;
    for (double R : {0.5, 1.0, 2.0, 10.0, 100.0}) {
      const ExchangeSpec r1 = rescale_long_range(mu, R);
      if (r1.mass != mu.mass) ok = false;
      if (!(rescale_long_range(r1, 3.0) == rescale_long_range(mu, R * 3.0))) ok = false;
      const double L = r1.support_radius() * 1.5;
      const GridFunction g = sample(r1, L, 2001);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] != g[g.size() - 1 - i]) ok = false;
    }
    add("model-core kernel invariants", ok, "mass invariance, composition, evenness of samples");
  }
  return rep;
}

}  // namespace roadspeed
