#pragma once

// Long-range sweeps R -> c*(R) and the regime split at D = 2d and D = d (2 + mu_bar/f'(0)).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

#include "roadspeed/dispersion.hpp"
#include "roadspeed/error.hpp"
#include "roadspeed/model.hpp"
#include "roadspeed/speedfinder.hpp"

namespace roadspeed {

enum class SweepRegime { subcritical, below_threshold, above_threshold };

inline std::string_view to_string(SweepRegime r) {
  switch (r) {
    case SweepRegime::subcritical: return "subcritical";
    case SweepRegime::below_threshold: return "below_threshold";
    case SweepRegime::above_threshold: return "above_threshold";
  }
  return "unknown";
}

struct RegimeClassification {
  SweepRegime regime;
  double predicted_infimum;
};

/// Infimum of c* over admissible kernels: c_K up to threshold_D (attained only when
/// D <= 2d), c_min_crossing beyond it.
inline RegimeClassification classify_regime(const ModelParams& p) {
  if (p.D <= 2.0 * p.d) return {SweepRegime::subcritical, p.c_kpp()};
  if (p.D <= threshold_D(p)) return {SweepRegime::below_threshold, p.c_kpp()};
  return {SweepRegime::above_threshold, c_min_crossing(p)};
}

enum class RescaleTarget { mu, nu, both };

inline std::string_view to_string(RescaleTarget t) {
  switch (t) {
    case RescaleTarget::mu: return "mu";
    case RescaleTarget::nu: return "nu";
    case RescaleTarget::both: return "both";
  }
  return "unknown";
}

inline RescaleTarget parse_rescale_target(std::string_view s) {
  if (s == "mu") return RescaleTarget::mu;
  if (s == "nu") return RescaleTarget::nu;
  if (s == "both") return RescaleTarget::both;
  throw Error(ErrorKind::config, "asymptotics.sweep_R", "rescale target must be mu, nu or both");
}

struct SweepResult {
  std::vector<double> scales;
  std::vector<double> speeds;
  std::vector<SpeedResult> details;
  double predicted_limit = 0.0;
  SweepRegime regime = SweepRegime::subcritical;
  bool converged = false;
};

/// Scales 4^0, 4^1, ..., 4^(count-1).
inline std::vector<double> geometric_scales(std::size_t count, double ratio = 4.0) {
  std::vector<double> out;
  double r = 1.0;
  for (std::size_t k = 0; k < count; ++k, r *= ratio) out.push_back(r);
  return out;
}

/// Worker count for sweeps: ROADSPEED_THREADS if set and positive, else 1.
inline unsigned sweep_threads() {
  if (const char* env = std::getenv("ROADSPEED_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

/// c*(R) for each R with the selected kernel(s) replaced by their long-range rescaling.
/// Entries are independent and may be computed concurrently; output order follows `scales`.
inline SweepResult sweep_R(const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu, RescaleTarget which,
                           const std::vector<double>& scales, const SpeedSearchConfig& cfg = {},
                           double converge_tol = 0.05, unsigned threads = sweep_threads()) {
  if (scales.empty()) throw Error(ErrorKind::invalid_parameter, "asymptotics.sweep_R", "no scales given");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] >= 1.0))
      throw Error(ErrorKind::invalid_parameter, "asymptotics.sweep_R", "scales must all be >= 1");
    if (i > 0 && !(scales[i] > scales[i - 1]))
      throw Error(ErrorKind::invalid_parameter, "asymptotics.sweep_R", "scales must be strictly increasing");
  }
  const RegimeClassification cls = classify_regime(p);

  SweepResult out;
  out.scales = scales;
  out.regime = cls.regime;
  out.predicted_limit = cls.predicted_infimum;
  out.details.resize(scales.size());

  auto run_one = [&](std::size_t i) {
    const double R = scales[i];
    const ExchangeSpec m = which == RescaleTarget::nu ? mu : rescale_long_range(mu, R);
    const ExchangeSpec n = which == RescaleTarget::mu ? nu : rescale_long_range(nu, R);
    out.details[i] = find_cstar(p, m, n, cfg);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(scales.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < scales.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < scales.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (const auto& d : out.details) out.speeds.push_back(d.c_star);
  out.converged = std::abs(out.speeds.back() - out.predicted_limit) <= converge_tol;
  return out;
}

/// Aitken extrapolation of the last three terms of a sequence sampled at geometric R.
/// Falls back to the last term when the differences do not contract.
inline double extrapolate_limit(const std::vector<double>& seq) {
  if (seq.size() < 3) return seq.empty() ? 0.0 : seq.back();
  const double c1 = seq[seq.size() - 3];
  const double c2 = seq[seq.size() - 2];
  const double c3 = seq[seq.size() - 1];
  const double d1 = c2 - c1;
  const double d2 = c3 - c2;
  const double denom = d2 - d1;
  if (denom == 0.0 || std::abs(d2) >= std::abs(d1)) return c3;
  return c3 - d2 * d2 / denom;
}

}  // namespace roadspeed
