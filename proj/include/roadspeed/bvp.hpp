#pragma once

// Transverse profile problem
//
//   -d phi'' + (P(lambda) + nu(y)) phi = mu(y),   phi in H^1(R),  phi >= 0,
//
// and the field curve Psi_2(lambda, c) = int nu phi.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "roadspeed/dispersion.hpp"
#include "roadspeed/error.hpp"
#include "roadspeed/model.hpp"

namespace roadspeed {

struct BvpSolution {
  GridFunction phi;
  double psi2 = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double decay_rate = 0.0;     // sqrt(P/d), far-field decay of phi
  double integral_phi = 0.0;   // int_R phi, including the exponential tails beyond +-L
};

/// Resolution policy for the profile grid.
struct GridConfig {
  double points_per_width = 200.0;   // nodes across the narrowest kernel half-width
  double points_per_decay = 20.0;    // nodes per inner decay length 1/sqrt((P + nu_max)/d)
  double pad_decay_lengths = 12.0;   // margin beyond the widest support, in inner decay lengths
  std::size_t min_nodes = 64;
};

/// Node count below which solve_phi refuses to run.
inline constexpr std::size_t kMinBvpNodes = 64;

namespace detail {

/// Ratio r in (0,1) of the decaying discrete exponential solving
/// -d (r - 2 + 1/r)/h^2 + P = 0; it closes the truncated grid exactly.
inline double discrete_decay_ratio(double P, double d, double h) {
  const double s = P * h * h / (2.0 * d);
  return 1.0 / (1.0 + s + std::sqrt(s * s + 2.0 * s));
}

/// Thomas algorithm for a symmetric tridiagonal system with constant off-diagonal.
inline void solve_tridiagonal(std::vector<double>& diag, double off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

}  // namespace detail

/// Solves the profile problem for many (lambda, c) on one fixed grid. Kernels are
/// sampled once at construction.
class PhiSolver {
public:
  PhiSolver(const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu, double L, std::size_t n)
      : p_(p), mu_(sample(mu, L, n)), nu_(sample(nu, L, n)) {
    if (n < kMinBvpNodes)
      throw Error(ErrorKind::resolution, "bvp.solve_phi", "grid has fewer than 64 nodes");
    mu_mass_ = trapezoid_mass(mu_);
  }

  const ModelParams& params() const { return p_; }
  const GridFunction& mu() const { return mu_; }
  const GridFunction& nu() const { return nu_; }
  double L() const { return mu_.L(); }
  std::size_t size() const { return mu_.size(); }
  double h() const { return mu_.h(); }
  /// Trapezoid mass of the sampled mu; the discrete analogue of mu_bar.
  double mu_mass() const { return mu_mass_; }

  BvpSolution solve(double lambda, double c) const {
    const double P = p_coeff(lambda, c, p_);
    if (!(P > 0.0))
      throw Error(ErrorKind::domain, "bvp.solve_phi",
                  "P(lambda) <= 0: lambda is outside (lambda_2^-, lambda_2^+), no decaying profile");
    const std::size_t n = size();
    const double h = this->h();
    const double k = p_.d / (h * h);
    const double r = detail::discrete_decay_ratio(P, p_.d, h);

    // Even data on a symmetric grid: solve on the half grid from the centre outwards
    // and mirror, which makes the profile even bit for bit.
    const std::size_t first = n / 2;  // centre node (n odd) or first node right of 0
    const std::size_t m = n - first;
    std::vector<double> diag(m);
    std::vector<double> rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
      diag[j] = 2.0 * k + P + nu_[first + j];
      rhs[j] = mu_[first + j];
    }
    if (n % 2 == 1) {
      // phi_{-1} = phi_{1}; the centre row is halved to keep the system symmetric
      diag[0] *= 0.5;
      rhs[0] *= 0.5;
    } else {
      // phi_{first-1} = phi_{first}
      diag[0] -= k;
    }
    diag[m - 1] -= k * r;
    detail::solve_tridiagonal(diag, -k, rhs);

    std::vector<double> x(n);
    for (std::size_t j = 0; j < m; ++j) x[first + j] = x[n - 1 - first - j] = rhs[j];

    BvpSolution s;
    s.lambda = lambda;
    s.c = c;
    s.decay_rate = std::sqrt(P / p_.d);
    s.phi = GridFunction(L(), std::move(x));

    GridFunction weighted(L(), n);
    for (std::size_t i = 0; i < n; ++i) weighted[i] = nu_[i] * s.phi[i];
    s.psi2 = trapezoid_mass(weighted);

    const double tail = h * (1.0 / (1.0 - r) - 0.5);
    s.integral_phi = trapezoid_mass(s.phi) + tail * (s.phi[0] + s.phi[n - 1]);
    return s;
  }

  double psi2(double lambda, double c) const { return solve(lambda, c).psi2; }

private:
  ModelParams p_;
  GridFunction mu_;
  GridFunction nu_;
  double mu_mass_ = 0.0;
};

/// One-shot profile solve on a grid of n nodes over [-L, L].
inline BvpSolution solve_phi(double lambda, double c, const ModelParams& p, const ExchangeSpec& mu,
                             const ExchangeSpec& nu, double L, std::size_t n) {
  return PhiSolver(p, mu, nu, L, n).solve(lambda, c);
}

/// Half-length and node count for profile solves at speeds up to c_max.
///
/// The spacing resolves both the narrowest kernel and the fastest inner decay, and is
/// chosen so that the narrowest support edge falls on a node. The exact discrete closure
/// at +-L makes the result independent of the padding up to rounding, so one grid can
/// serve every lambda and every c <= c_max.
struct GridSize {
  double L;
  std::size_t n;
};

inline GridSize make_phi_grid(const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu, double c_max,
                              const GridConfig& cfg = {}) {
  const double cK = p.c_kpp();
  const double p_max = c_max > cK ? (c_max - cK) * (c_max + cK) / (4.0 * p.d) : 0.0;
  const double nu_peak = nu.is_zero() ? 0.0 : nu.peak();
  const double kappa = std::sqrt((p_max + nu_peak) / p.d);
  const double w_min = std::min(mu.support_radius(), nu.support_radius());
  const double w_max = std::max(mu.support_radius(), nu.support_radius());

  double h_target = w_min / cfg.points_per_width;
  if (kappa > 0.0) h_target = std::min(h_target, 1.0 / (kappa * cfg.points_per_decay));
  const double m = std::ceil(w_min / h_target);
  const double h = w_min / m;
  const double pad = kappa > 0.0 ? cfg.pad_decay_lengths / kappa : cfg.pad_decay_lengths * w_min;
  double half_nodes = std::ceil((w_max + pad) / h);
  const double min_half = std::ceil(0.5 * static_cast<double>(std::max(cfg.min_nodes, kMinBvpNodes)));
  half_nodes = std::max(half_nodes, min_half);
  return {half_nodes * h, static_cast<std::size_t>(2.0 * half_nodes) + 1};
}

/// Closed-form profile for box kernels mu = m 1[-a_w, a_w], nu = n_h 1[-a_w, a_w],
/// evaluated on the n-node grid over [-L, L].
///
/// Inside:  phi = m/Q + A cosh(k1 y),   Q = P + n_h, k1 = sqrt(Q/d)
/// Outside: phi = B exp(-k0 (|y| - a_w)), k0 = sqrt(P/d)
/// with A, B fixed by C^1 matching at |y| = a_w.
inline BvpSolution box_oracle_phi(double lambda, double c, const ModelParams& p, double m, double n_h, double a_w,
                                  double L, std::size_t n) {
  const double P = p_coeff(lambda, c, p);
  if (!(P > 0.0)) throw Error(ErrorKind::domain, "bvp.box_oracle_phi", "P(lambda) <= 0");
  const double Q = P + n_h;
  const double k0 = std::sqrt(P / p.d);
  const double k1 = std::sqrt(Q / p.d);
  const double e2 = std::exp(-2.0 * k1 * a_w);
  const double coth = (1.0 + e2) / (1.0 - e2);
  const double B = (m / Q) / (1.0 + (k0 / k1) * coth);
  const double A_scaled = -k0 * B / k1;  // A sinh(k1 a_w)

  BvpSolution s;
  s.lambda = lambda;
  s.c = c;
  s.decay_rate = k0;
  s.phi = GridFunction(L, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::abs(s.phi.y(i));
    if (r <= a_w) {
      // cosh(k1 r)/sinh(k1 a_w) without overflow
      const double ratio = (std::exp(k1 * (r - a_w)) + std::exp(-k1 * (r + a_w))) / (1.0 - e2);
      s.phi[i] = m / Q + A_scaled * ratio;
    } else {
      s.phi[i] = B * std::exp(-k0 * (r - a_w));
    }
  }
  const double inner = 2.0 * a_w * m / Q + 2.0 * A_scaled / k1;
  s.psi2 = n_h * inner;
  s.integral_phi = inner + 2.0 * B / k0;
  return s;
}

/// Extrapolated endpoint values of Psi_2 at lambda_2^- and lambda_2^+.
struct EndpointCheck {
  double left = 0.0;
  double right = 0.0;
  std::array<double, 3> ladder{};         // delta / (lambda_2^+ - lambda_2^-)
  std::array<double, 3> left_values{};
  std::array<double, 3> right_values{};
  bool monotone_from_below = false;       // both sides increase toward mu_bar as delta shrinks
};

/// Psi_2 near lambda_2^+- behaves like mu_bar - C sqrt(delta); values on a delta ladder are
/// extrapolated to delta = 0 by a quadratic in sqrt(delta).
inline EndpointCheck psi2_endpoint_check(double c, const PhiSolver& solver,
                                         std::array<double, 3> ladder = {1e-2, 1e-3, 1e-4}) {
  const auto [lo, hi] = lambda2_pm(c, solver.params());
  const double width = hi - lo;
  EndpointCheck out;
  out.ladder = ladder;
  std::array<double, 3> s{};
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(ladder[k] > 0.0)) throw Error(ErrorKind::domain, "bvp.psi2_endpoint_check", "delta must be > 0");
    const double delta = ladder[k] * width;
    s[k] = std::sqrt(delta);
    out.left_values[k] = solver.psi2(lo + delta, c);
    out.right_values[k] = solver.psi2(hi - delta, c);
  }
  auto extrapolate = [&](const std::array<double, 3>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      double w = 1.0;
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i) w *= (0.0 - s[j]) / (s[i] - s[j]);
      acc += w * v[i];
    }
    return acc;
  };
  out.left = extrapolate(out.left_values);
  out.right = extrapolate(out.right_values);
  const double target = solver.mu_mass();
  auto rising = [&](const std::array<double, 3>& v) {
    return v[0] < v[1] && v[1] < v[2] && v[2] < target;
  };
  out.monotone_from_below = rising(out.left_values) && rising(out.right_values);
  return out;
}

inline EndpointCheck psi2_endpoint_check(double c, const ModelParams& p, const ExchangeSpec& mu,
                                         const ExchangeSpec& nu, double L, std::size_t n) {
  return psi2_endpoint_check(c, PhiSolver(p, mu, nu, L, n));
}

}  // namespace roadspeed
