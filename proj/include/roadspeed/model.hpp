#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "roadspeed/error.hpp"

namespace roadspeed {

/// Scalar parameters of the road-field system.
///   d      field diffusivity
///   D      road diffusivity
///   a      f'(0), linear growth rate of the KPP term
///   mu_bar total mass of the field <- road exchange kernel mu
///   nu_bar total mass of the road <- field exchange kernel nu
struct ModelParams {
  double d = 1.0;
  double D = 1.0;
  double a = 1.0;
  double mu_bar = 1.0;
  double nu_bar = 1.0;

  /// Classical Fisher-KPP speed 2 sqrt(d a).
  double c_kpp() const { return 2.0 * std::sqrt(d * a); }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::invalid_parameter, "model-core.ModelParams",
                    std::string(name) + " must be finite and > 0");
    };
    positive(d, "d");
    positive(D, "D");
    positive(a, "a");
    positive(mu_bar, "mu_bar");
    positive(nu_bar, "nu_bar");
  }
};

enum class KernelShape { box, triangle, raised_cosine };

inline std::string_view to_string(KernelShape s) {
  switch (s) {
    case KernelShape::box: return "box";
    case KernelShape::triangle: return "triangle";
    case KernelShape::raised_cosine: return "raised-cosine";
  }
  return "unknown";
}

inline KernelShape parse_kernel_shape(std::string_view name) {
  if (name == "box") return KernelShape::box;
  if (name == "triangle") return KernelShape::triangle;
  if (name == "raised-cosine" || name == "raised_cosine") return KernelShape::raised_cosine;
  throw Error(ErrorKind::config, "model-core.ExchangeSpec", "unknown kernel shape '" + std::string(name) + "'");
}

/// Even, nonnegative, compactly supported exchange kernel with prescribed mass.
///
/// The represented function lives on [-half_width*range_scale, half_width*range_scale]:
///   box            mass/(2w)                     on |y| < w
///   triangle       (mass/w) (1 - |y|/w)
///   raised-cosine  (mass/(2w)) (1 + cos(pi y/w))
/// with w = half_width * range_scale. A box evaluates to half its height exactly at
/// |y| = w (mean of the one-sided limits), which keeps its trapezoid mass exact on grids
/// that contain the jump points.
struct ExchangeSpec {
  KernelShape shape = KernelShape::box;
  double half_width = 1.0;
  double mass = 1.0;
  double range_scale = 1.0;

  static ExchangeSpec make(KernelShape shape, double half_width, double mass, double range_scale = 1.0) {
    ExchangeSpec s{shape, half_width, mass, range_scale};
    s.validate();
    return s;
  }

  /// Identically zero kernel. Only meaningful as a test fixture or as the decoupled
  /// control in the simulator; never admissible for the dispersion analysis.
  static ExchangeSpec zero(KernelShape shape = KernelShape::box, double half_width = 1.0) {
    return ExchangeSpec{shape, half_width, 0.0, 1.0};
  }

  bool is_zero() const { return mass == 0.0; }

  void validate(bool allow_zero_mass = false) const {
    const char* where = "model-core.ExchangeSpec";
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw Error(ErrorKind::invalid_parameter, where, "half_width must be finite and > 0");
    if (!(range_scale > 0.0) || !std::isfinite(range_scale))
      throw Error(ErrorKind::invalid_parameter, where, "range_scale must be finite and > 0");
    if (!std::isfinite(mass) || mass < 0.0 || (mass == 0.0 && !allow_zero_mass))
      throw Error(ErrorKind::invalid_parameter, where, "mass must be finite and > 0");
  }

  double support_radius() const { return half_width * range_scale; }

  double peak() const {
    const double w = support_radius();
    return shape == KernelShape::box ? mass / (2.0 * w) : mass / w;
  }

  /// Pointwise closed form.
  double operator()(double y) const {
    const double w = support_radius();
    const double r = std::abs(y);
    if (r > w) return 0.0;
    switch (shape) {
      case KernelShape::box:
        return r == w ? 0.5 * mass / (2.0 * w) : mass / (2.0 * w);
      case KernelShape::triangle:
        return mass / w * (1.0 - r / w);
      case KernelShape::raised_cosine:
        return mass / (2.0 * w) * (1.0 + std::cos(std::numbers::pi * r / w));
    }
    return 0.0;
  }

  bool operator==(const ExchangeSpec&) const = default;
};

/// Uniform samples of a function of y on [-L, L], symmetric about 0.
class GridFunction {
public:
  GridFunction() = default;

  GridFunction(double L, std::size_t n) : L_(L), values_(n, 0.0) {
    if (n < 3) throw Error(ErrorKind::invalid_grid, "model-core.GridFunction", "need n >= 3 nodes");
    if (!(L > 0.0) || !std::isfinite(L))
      throw Error(ErrorKind::invalid_grid, "model-core.GridFunction", "half-length L must be finite and > 0");
  }

  GridFunction(double L, std::vector<double> values) : GridFunction(L, values.size()) {
    values_ = std::move(values);
  }

  double L() const { return L_; }
  std::size_t size() const { return values_.size(); }
  double h() const { return 2.0 * L_ / static_cast<double>(values_.size() - 1); }

  /// y_i computed from the centre outwards so that y(i) == -y(n-1-i) bit for bit.
  double y(std::size_t i) const {
    const double offset = static_cast<double>(i) - 0.5 * static_cast<double>(values_.size() - 1);
    return offset * h();
  }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  double L_ = 1.0;
  std::vector<double> values_{0.0, 0.0, 0.0};
};

/// Composite trapezoid rule over the grid. Mirror nodes are added in pairs, so odd
/// samples on a symmetric grid integrate to exactly zero.
inline double trapezoid_mass(const GridFunction& g) {
  const std::size_t n = g.size();
  double sum = 0.5 * (g[0] + g[n - 1]);
  for (std::size_t i = 1; i < n / 2; ++i) sum += g[i] + g[n - 1 - i];
  if (n % 2 == 1) sum += g[n / 2];
  return g.h() * sum;
}

/// Samples a kernel at the nodes of a symmetric grid on [-L, L].
inline GridFunction sample(const ExchangeSpec& spec, double L, std::size_t n) {
  spec.validate(/*allow_zero_mass=*/true);
  if (n < 3) throw Error(ErrorKind::invalid_grid, "model-core.sample", "need n >= 3 nodes");
  const double radius = spec.support_radius();
  if (L < radius * (1.0 - 1e-12))
    throw Error(ErrorKind::domain_too_small, "model-core.sample", "L is smaller than the kernel support radius");
  GridFunction g(L, n);
  const double h = g.h();
  // Nodes that land on a box edge up to rounding get the mid value.
  const double snap = 1e-9 * h;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = g.y(i);
    if (spec.shape == KernelShape::box && std::abs(std::abs(y) - radius) <= snap)
      g[i] = 0.5 * spec.peak();
    else
      g[i] = spec(y);
  }
  return g;
}

/// Long-range rescaling mu_R(y) = mu(y/R)/R: same mass, support widened by R.
inline ExchangeSpec rescale_long_range(const ExchangeSpec& spec, double R) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw Error(ErrorKind::invalid_parameter, "model-core.rescale_long_range", "scale R must be finite and > 0");
  ExchangeSpec out = spec;
  out.range_scale = spec.range_scale * R;
  return out;
}

/// Logistic KPP term a v (1 - v).
inline double reaction(double v, double a) { return a * v * (1.0 - v); }

}  // namespace roadspeed
