#pragma once

// Explicit finite-difference integration of the road-field system
//
//   u_t - D u_xx   = -mu_bar u + int nu(y) v(t,x,y) dy
//   v_t - d Lap v  = f(v) + mu(y) u(t,x) - nu(y) v(t,x,y)
//
// on the strip [-Lx, Lx] x [-Ly, Ly] with homogeneous Neumann walls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "roadspeed/error.hpp"
#include "roadspeed/model.hpp"

namespace roadspeed {

/// Which density the front tracker follows.
enum class FrontSignal { road, field_centerline };

struct SimConfig {
  double Lx = 150.0;
  double Ly = 11.0;
  std::size_t nx = 2001;
  std::size_t ny = 201;
  double dt = 0.0;            // 0 selects the largest stable step
  double t_end = 60.0;
  double theta = 0.1;         // front threshold as a fraction of the plateau
  double fit_window = 1.0 / 3.0;
  double record_interval = 0.25;
  FrontSignal signal = FrontSignal::road;
  bool reaction = true;       // false switches f off (conservation checks)

  double hx() const { return 2.0 * Lx / static_cast<double>(nx - 1); }
  double hy() const { return 2.0 * Ly / static_cast<double>(ny - 1); }
  double x(std::size_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(nx - 1)) * hx(); }
  double y(std::size_t j) const { return (static_cast<double>(j) - 0.5 * static_cast<double>(ny - 1)) * hy(); }
};

/// Compactly supported even initial datum: raised-cosine bumps of the given radius,
/// u0(x) = amp_u b(x), v0(x, y) = amp_v b(x) b(y).
struct InitialBump {
  double amplitude_u = 1.0;
  double amplitude_v = 1.0;
  double radius = 4.0;

  double profile(double s) const {
    const double r = std::abs(s);
    return r >= radius ? 0.0 : 0.5 * (1.0 + std::cos(3.14159265358979323846 * r / radius));
  }
};

struct SimState {
  double t = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> u;   // u[ix]
  std::vector<double> v;   // v[ix * ny + iy]

  double& field(std::size_t ix, std::size_t iy) { return v[ix * ny + iy]; }
  double field(std::size_t ix, std::size_t iy) const { return v[ix * ny + iy]; }
};

struct FrontTrace {
  std::vector<double> times;
  std::vector<double> positions;
  double fitted_speed = 0.0;
  double plateau = 0.0;
};

class RoadFieldSimulator {
public:
  RoadFieldSimulator(const SimConfig& cfg, const ModelParams& p, const ExchangeSpec& mu, const ExchangeSpec& nu)
      : cfg_(cfg), p_(p) {
    const char* where = "pdesim.SimConfig";
    if (cfg.nx < 3 || cfg.ny < 3) throw Error(ErrorKind::invalid_grid, where, "need nx, ny >= 3");
    if (!(cfg.Lx > 0.0) || !(cfg.Ly > 0.0)) throw Error(ErrorKind::invalid_grid, where, "Lx, Ly must be > 0");
    if (!(cfg.t_end > 0.0)) throw Error(ErrorKind::invalid_parameter, where, "t_end must be > 0");
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw Error(ErrorKind::invalid_parameter, where, "theta in (0,1)");
    if (!(cfg.fit_window > 0.0 && cfg.fit_window <= 1.0))
      throw Error(ErrorKind::invalid_parameter, where, "fit_window in (0,1]");
    const double margin = std::max(mu.support_radius(), nu.support_radius()) + 10.0 * std::sqrt(p.d / p.a);
    if (cfg.Ly < margin * (1.0 - 1e-12))
      throw Error(ErrorKind::invalid_parameter, where,
                  "Ly must be at least the kernel support plus 10 sqrt(d/a) = " + std::to_string(margin));

    const GridFunction mu_s = sample(mu, cfg.Ly, cfg.ny);
    const GridFunction nu_s = sample(nu, cfg.Ly, cfg.ny);
    mu_ = mu_s.values();
    nu_ = nu_s.values();
    mu_mass_ = trapezoid_mass(mu_s);
    nu_mass_ = trapezoid_mass(nu_s);
    const double hy = cfg.hy();
    wy_.assign(cfg.ny, hy);
    wy_.front() = wy_.back() = 0.5 * hy;
    wnu_.resize(cfg.ny);
    for (std::size_t j = 0; j < cfg.ny; ++j) wnu_[j] = wy_[j] * nu_[j];
    nu_max_ = *std::max_element(nu_.begin(), nu_.end());
    blowup_reference_ = expected_plateau();

    dt_ = cfg.dt > 0.0 ? cfg.dt : max_stable_dt();
    if (dt_ > max_stable_dt() * (1.0 + 1e-12))
      throw Error(ErrorKind::invalid_parameter, where,
                  "dt exceeds the explicit stability bound " + std::to_string(max_stable_dt()));
  }

  /// 0.9 times the smallest of: min(hx^2, hy^2) / (2 max(d, D)), and the steps that keep
  /// every explicit update a nonnegative combination (road and field rows separately).
  double max_stable_dt() const {
    const double hx2 = cfg_.hx() * cfg_.hx();
    const double hy2 = cfg_.hy() * cfg_.hy();
    const double simple = std::min(hx2, hy2) / (2.0 * std::max(p_.d, p_.D));
    const double road = 1.0 / (2.0 * p_.D / hx2 + mu_mass_);
    const double field = 1.0 / (2.0 * p_.d * (1.0 / hx2 + 1.0 / hy2) + nu_max_ + (cfg_.reaction ? p_.a : 0.0));
    return 0.9 * std::min({simple, road, field});
  }

  double dt() const { return dt_; }
  const SimConfig& config() const { return cfg_; }
  double mu_mass() const { return mu_mass_; }
  double nu_mass() const { return nu_mass_; }

  SimState initial_state(const InitialBump& bump) const {
    SimState s = zero_state();
    for (std::size_t i = 0; i < cfg_.nx; ++i) {
      const double bx = bump.profile(cfg_.x(i));
      s.u[i] = bump.amplitude_u * bx;
      for (std::size_t j = 0; j < cfg_.ny; ++j) s.field(i, j) = bump.amplitude_v * bx * bump.profile(cfg_.y(j));
    }
    return s;
  }

  SimState zero_state() const {
    SimState s;
    s.nx = cfg_.nx;
    s.ny = cfg_.ny;
    s.u.assign(cfg_.nx, 0.0);
    s.v.assign(cfg_.nx * cfg_.ny, 0.0);
    return s;
  }

  /// Trapezoid mass int u dx + int int v dx dy.
  double total_mass(const SimState& s) const {
    const double hx = cfg_.hx();
    double total = 0.0;
    for (std::size_t i = 0; i < s.nx; ++i) {
      double col = s.u[i];
      const double* vr = s.v.data() + i * s.ny;
      for (std::size_t j = 0; j < s.ny; ++j) col += wy_[j] * vr[j];
      total += (i == 0 || i + 1 == s.nx ? 0.5 * hx : hx) * col;
    }
    return total;
  }

  /// Expected size of the invaded state, used for blow-up detection.
  double expected_plateau() const { return std::max(1.0, mu_mass_ > 0.0 ? nu_mass_ / mu_mass_ : 0.0); }

  /// One explicit Euler step; all couplings at the current time level.
  void step(const SimState& in, SimState& out) const {
    const std::size_t nx = in.nx, ny = in.ny;
    out.nx = nx;
    out.ny = ny;
    out.u.resize(nx);
    out.v.resize(nx * ny);
    const double hx2 = cfg_.hx() * cfg_.hx();
    const double hy2 = cfg_.hy() * cfg_.hy();
    const double dt = dt_;
    const double cD = p_.D / hx2;
    const double cdx = p_.d / hx2;
    const double cdy = p_.d / hy2;
    const double a = cfg_.reaction ? p_.a : 0.0;
    const double mbar = mu_mass_;
    const double* u = in.u.data();
    const double* mu = mu_.data();
    const double* nu = nu_.data();
    const double* wnu = wnu_.data();
    double lo = 0.0;
    double hi = 0.0;

    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t im = i == 0 ? 1 : i - 1;
      const std::size_t ip = i + 1 == nx ? nx - 2 : i + 1;
      const double* vr = in.v.data() + i * ny;
      const double* vm = in.v.data() + im * ny;
      const double* vp = in.v.data() + ip * ny;
      double* vo = out.v.data() + i * ny;

      double exch = 0.0;
      for (std::size_t j = 0; j < ny; ++j) exch += wnu[j] * vr[j];
      const double ui = u[i];
      const double un = ui + dt * (cD * ((u[im] + u[ip]) - 2.0 * ui) - mbar * ui + exch);
      out.u[i] = un;
      lo = std::min(lo, un);
      hi = std::max(hi, un);

      auto update = [&](std::size_t j, double vy_sum) {
        const double vv = vr[j];
        const double lap = cdx * ((vm[j] + vp[j]) - 2.0 * vv) + cdy * (vy_sum - 2.0 * vv);
        return vv + dt * (lap + a * vv * (1.0 - vv) + mu[j] * ui - nu[j] * vv);
      };
      vo[0] = update(0, 2.0 * vr[1]);
      for (std::size_t j = 1; j + 1 < ny; ++j) vo[j] = update(j, vr[j - 1] + vr[j + 1]);
      vo[ny - 1] = update(ny - 1, 2.0 * vr[ny - 2]);
      for (std::size_t j = 0; j < ny; ++j) {
        lo = std::min(lo, vo[j]);
        hi = std::max(hi, vo[j]);
      }
    }
    out.t = in.t + dt;
    if (lo < 0.0)
      throw Error(ErrorKind::instability, "pdesim.step",
                  "negative density " + std::to_string(lo) + " at t = " + std::to_string(out.t));
    if (!(hi <= 10.0 * blowup_reference_) || !std::isfinite(hi))
      throw Error(ErrorKind::instability, "pdesim.step",
                  "density " + std::to_string(hi) + " exceeds 10x the expected plateau at t = " + std::to_string(out.t));
  }

  SimState step(const SimState& in) const {
    SimState out;
    step(in, out);
    return out;
  }

  /// Reference for blow-up detection; at least the expected plateau.
  void set_blowup_reference(double r) { blowup_reference_ = std::max(r, expected_plateau()); }

  /// Tracked signal along x: u, or v on the centre line y = 0.
  std::vector<double> signal(const SimState& s) const {
    if (cfg_.signal == FrontSignal::road) return s.u;
    std::vector<double> out(s.nx);
    const std::size_t jc = s.ny / 2;
    for (std::size_t i = 0; i < s.nx; ++i)
      out[i] = s.ny % 2 == 1 ? s.field(i, jc) : 0.5 * (s.field(i, jc - 1) + s.field(i, jc));
    return out;
  }

  /// Rightmost x with sig >= level, linearly interpolated; NaN if the level is never reached.
  double front_position(const std::vector<double>& sig, double level) const {
    for (std::size_t i = sig.size(); i-- > 0;) {
      if (sig[i] >= level) {
        if (i + 1 == sig.size()) return cfg_.x(i);
        const double frac = (sig[i] - level) / (sig[i] - sig[i + 1]);
        return cfg_.x(i) + frac * cfg_.hx();
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  FrontTrace run_front_speed(const InitialBump& bump) {
    set_blowup_reference(std::max(bump.amplitude_u, bump.amplitude_v));
    SimState cur = initial_state(bump);
    SimState next = zero_state();
    std::vector<double> snap_times;
    std::vector<std::vector<double>> snaps;
    double next_record = cfg_.record_interval;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(cfg_.t_end / dt_ - 1e-9));
    for (std::size_t k = 0; k < steps; ++k) {
      step(cur, next);
      std::swap(cur, next);
      if (cur.t >= next_record - 1e-12 || k + 1 == steps) {
        snap_times.push_back(cur.t);
        snaps.push_back(signal(cur));
        next_record += cfg_.record_interval;
      }
    }

    FrontTrace trace;
    const std::vector<double>& last = snaps.back();
    trace.plateau = 0.5 * (last[(last.size() - 1) / 2] + last[last.size() / 2]);
    const double level = cfg_.theta * trace.plateau;
    const double wall = cfg_.Lx - 5.0 * std::sqrt(p_.d / p_.a);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const double x = front_position(snaps[k], level);
      if (std::isnan(x)) continue;
      if (x > wall)
        throw Error(ErrorKind::front_at_boundary, "pdesim.run_front_speed",
                    "front reached x = " + std::to_string(x) + " at t = " + std::to_string(snap_times[k]) +
                        "; enlarge Lx or shorten t_end");
      trace.times.push_back(snap_times[k]);
      trace.positions.push_back(x);
    }
    trace.fitted_speed = fit_speed(trace.times, trace.positions, cfg_.t_end * (1.0 - cfg_.fit_window));
    return trace;
  }

  /// Least-squares slope of positions against times for times >= t_from.
  static double fit_speed(const std::vector<double>& t, const std::vector<double>& x, double t_from) {
    double n = 0.0, st = 0.0, sx = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] >= t_from) {
        n += 1.0;
        st += t[k];
        sx += x[k];
      }
    if (n < 2.0) return std::numeric_limits<double>::quiet_NaN();
    const double tm = st / n, xm = sx / n;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] >= t_from) {
        num += (t[k] - tm) * (x[k] - xm);
        den += (t[k] - tm) * (t[k] - tm);
      }
    return num / den;
  }

private:
  SimConfig cfg_;
  ModelParams p_;
  std::vector<double> mu_, nu_, wy_, wnu_;
  double mu_mass_ = 0.0;
  double nu_mass_ = 0.0;
  double nu_max_ = 0.0;
  double dt_ = 0.0;
  double blowup_reference_ = 1.0;
};

/// Single explicit step of the coupled system.
inline SimState step(const SimState& state, const SimConfig& cfg, const ModelParams& p, const ExchangeSpec& mu,
                     const ExchangeSpec& nu) {
  return RoadFieldSimulator(cfg, p, mu, nu).step(state);
}

inline FrontTrace run_front_speed(const SimConfig& cfg, const ModelParams& p, const ExchangeSpec& mu,
                                  const ExchangeSpec& nu, const InitialBump& initial = {}) {
  return RoadFieldSimulator(cfg, p, mu, nu).run_front_speed(initial);
}

}  // namespace roadspeed
