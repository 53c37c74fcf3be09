#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kci/defaults.hpp"
#include "kci/errors.hpp"
#include "kci/spatial.hpp"

namespace kci {

// Kirchhoff diffusivity a(s), required to take values in [1, 2].
struct DiffusivitySpec {
  std::function<double(double)> fn;
  std::string name = "custom";
  bool monotone = false;

  double operator()(double s) const {
    double v = fn(s);
    if (!(v >= 1.0 - 1e-9 && v <= 2.0 + 1e-9))
      throw numerical_error("diffusivity left [1,2] at s=" + std::to_string(s));
    return v;
  }

  static DiffusivitySpec make(std::function<double(double)> f, std::string name,
                              bool monotone = false) {
    require(static_cast<bool>(f), "diffusivity function must be callable");
    DiffusivitySpec d{std::move(f), std::move(name), monotone};
    double prev = -1.0;
    for (double s : {0.0, 1e-8, 1e-4, 0.01, 0.1, 0.5, 0.9, 1.0, 1.5, 2.0, 5.0, 10.0, 100.0,
                     1e4, 1e6}) {
      double v = d.fn(s);
      require(std::isfinite(v) && v >= 1.0 - 1e-12 && v <= 2.0 + 1e-12,
              "diffusivity must map into [1,2]; got " + std::to_string(v) + " at s=" +
                  std::to_string(s));
      if (monotone) {
        require(v >= prev - 1e-12, "diffusivity flagged monotone but decreases near s=" +
                                       std::to_string(s));
        prev = v;
      }
    }
    return d;
  }
};

inline DiffusivitySpec diffusivity_constant(double c) {
  require(c >= 1.0 && c <= 2.0, "constant diffusivity must lie in [1,2]");
  return DiffusivitySpec::make([c](double) { return c; }, "constant:" + std::to_string(c), true);
}

inline DiffusivitySpec diffusivity_saturating() {
  return DiffusivitySpec::make([](double s) { return 1.0 + std::min(1.0, s); }, "saturating", true);
}

inline DiffusivitySpec diffusivity_rational() {
  return DiffusivitySpec::make([](double s) { return 2.0 - 1.0 / (1.0 + s); }, "rational", true);
}

// Cubic damping schedule beta(t) with range [b1, b2], defined on all of R so
// trajectories can be started arbitrarily far in the past.
struct ForcingSpec {
  double lambda = 0.0;
  double b1 = 1.0, b2 = 1.0;
  std::function<double(double)> beta;
  std::string name = "custom";

  double beta_at(double t) const {
    double v = beta(t);
    if (!(v >= b1 - 1e-9 && v <= b2 + 1e-9))
      throw numerical_error("beta left [b1,b2] at t=" + std::to_string(t));
    return v;
  }

  static ForcingSpec make(double lambda, double b1, double b2, std::function<double(double)> beta,
                          std::string name) {
    require(std::isfinite(lambda), "lambda must be finite");
    require(b1 > 0.0 && b1 <= b2, "need 0 < b1 <= b2");
    require(static_cast<bool>(beta), "beta must be callable");
    ForcingSpec f{lambda, b1, b2, std::move(beta), std::move(name)};
    for (int i = -80; i <= 80; ++i) {
      double t = 2.5 * i;
      double v = f.beta(t);
      require(std::isfinite(v) && v >= b1 - 1e-9 && v <= b2 + 1e-9,
              "beta must map into [b1,b2]; got " + std::to_string(v) + " at t=" + std::to_string(t));
    }
    return f;
  }

  static ForcingSpec constant(double lambda, double b) {
    return make(lambda, b, b, [b](double) { return b; }, "constant:" + std::to_string(b));
  }

  static ForcingSpec sinusoidal(double lambda, double b1, double b2, double omega) {
    require(omega > 0.0, "sinusoidal beta needs omega > 0");
    return make(lambda, b1, b2,
                [b1, b2, omega](double t) { return b1 + (b2 - b1) * 0.5 * (1.0 + std::sin(omega * t)); },
                "sinusoidal");
  }

  // piecewise-linear interpolation of (t, beta) knots, clamped outside the table
  static ForcingSpec table(double lambda, std::vector<std::pair<double, double>> knots) {
    require(knots.size() >= 2, "beta table needs at least two knots");
    for (size_t i = 1; i < knots.size(); ++i)
      require(knots[i].first > knots[i - 1].first, "beta table times must increase");
    double lo = knots[0].second, hi = knots[0].second;
    for (auto& [t, v] : knots) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    require(lo > 0.0, "beta table values must be positive");
    auto eval = [knots](double t) {
      if (t <= knots.front().first) return knots.front().second;
      if (t >= knots.back().first) return knots.back().second;
      size_t i = 1;
      while (knots[i].first < t) ++i;
      auto [t0, v0] = knots[i - 1];
      auto [t1, v1] = knots[i];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    };
    return make(lambda, lo, hi, eval, "table");
  }
};

enum class ProblemKind { nonlocal, time_changed, local_upper, local_lower, autonomous_nonlocal };

inline const char* kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::nonlocal: return "nonlocal";
    case ProblemKind::time_changed: return "time_changed";
    case ProblemKind::local_upper: return "local_upper";
    case ProblemKind::local_lower: return "local_lower";
    case ProblemKind::autonomous_nonlocal: return "autonomous_nonlocal";
  }
  return "?";
}

// Strictly increasing piecewise-linear map between two time axes.
struct TimeMapPolyline {
  std::vector<double> t, phi;

  void push(double tt, double ph) {
    t.push_back(tt);
    phi.push_back(ph);
  }

  double phi_at(double tt) const { return interp(t, phi, tt, "time map"); }
  double t_at(double ph) const { return interp(phi, t, ph, "inverse time map"); }

 private:
  static double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                       const char* what) {
    require(xs.size() >= 2, std::string(what) + " has fewer than two samples");
    require(x >= xs.front() - 1e-12 && x <= xs.back() + 1e-12,
            std::string(what) + " evaluated outside its range (extrapolation forbidden)");
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    size_t i = static_cast<size_t>(it - xs.begin());
    if (xs[i] == x) return ys[i];
    if (i == 0) return ys.front();
    double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }
};

// One of the five evolution problems sharing the reaction family
// f = lambda u - (damping) u^3 and Dirichlet diffusion:
//   nonlocal             u_t = a(|u_x|^2) u_xx + lambda u - beta(t) u^3
//   time_changed         w_t = w_xx + (lambda w - beta(phi^-1(t)) w^3) / a(|w_x|^2)
//   local_upper          z_t = z_xx + lambda z - (b1/2) z^3
//   local_lower          v_t = v_xx + (lambda/2) v - b2 v^3
//   autonomous_nonlocal  u_t = a(|u_x|^2) u_xx + lambda u - b u^3
struct ProblemSpec {
  ProblemKind kind = ProblemKind::nonlocal;
  DiffusivitySpec diffusivity;
  ForcingSpec forcing;
  // time_changed: recorded map from a reference run; absent means the inverse
  // time is accumulated on the fly during integration.
  std::optional<TimeMapPolyline> reference_map;

  static ProblemSpec nonlocal(DiffusivitySpec a, ForcingSpec f) {
    return ProblemSpec{ProblemKind::nonlocal, std::move(a), std::move(f), std::nullopt};
  }
  static ProblemSpec time_changed(DiffusivitySpec a, ForcingSpec f,
                                  std::optional<TimeMapPolyline> ref = std::nullopt) {
    return ProblemSpec{ProblemKind::time_changed, std::move(a), std::move(f), std::move(ref)};
  }
  static ProblemSpec local_upper(ForcingSpec f) {
    return ProblemSpec{ProblemKind::local_upper, diffusivity_constant(1.0), std::move(f),
                       std::nullopt};
  }
  static ProblemSpec local_lower(ForcingSpec f) {
    return ProblemSpec{ProblemKind::local_lower, diffusivity_constant(1.0), std::move(f),
                       std::nullopt};
  }
  static ProblemSpec autonomous_nonlocal(DiffusivitySpec a, double lambda, double b) {
    return ProblemSpec{ProblemKind::autonomous_nonlocal, std::move(a),
                       ForcingSpec::constant(lambda, b), std::nullopt};
  }
};

struct StepOptions {
  // shift used by the comparison harnesses so all legs share one resolvent;
  // zero keeps the plain IMEX split
  double gamma = 0.0;
  double blowup_threshold = defaults::blowup_threshold;
};

// Semi-implicit integrator: the reaction (plus the optional gamma shift) is
// explicit, diffusion and the gamma damping implicit. The implicit solve is
// diagonal in the sine basis with compact fourth-order eigenvalues
// mu~_k = mu_k / (1 - h^2 mu_k / 12), mu_k the three-point eigenvalues; the
// resulting resolvent is entrywise nonnegative, which is what makes the
// discrete comparison principle exact.
class Stepper {
 public:
  Stepper(const Profile& u0, double start_time, ProblemSpec problem, double dt,
          StepOptions opt = {})
      : problem_(std::move(problem)), grid_(u0.grid), dt_(dt), opt_(opt), t_(start_time) {
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive and finite");
    Profile u = with_modes(u0);
    vals_ = u.values;
    modes_ = *u.modes;
    const int n = grid_.n;
    const double L = grid_.length;
    const double h = grid_.h();
    kw2_.resize(static_cast<size_t>(n));
    mu_tilde_.resize(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k) {
      double w = k * std::numbers::pi / L;
      kw2_[static_cast<size_t>(k - 1)] = w * w;
      double s = std::sin(0.5 * k * std::numbers::pi / (n + 1));
      double mu = 4.0 / (h * h) * s * s;
      mu_tilde_[static_cast<size_t>(k - 1)] = mu / (1.0 - h * h * mu / 12.0);
    }
    norm_sq_ = weighted_norm(kw2_);
    a_val_ = problem_.diffusivity(norm_sq_);
    if (problem_.kind == ProblemKind::time_changed && !problem_.reference_map)
      online_torig_ = start_time;  // changed and original clocks both start here
  }

  // advance by dt_step (defaults to the configured dt); false on blow-up,
  // in which case the state keeps the last finite values
  bool advance(double dt_step) {
    if (blown_) return false;
    const int n = grid_.n;
    const double g = opt_.gamma;
    const double c = diffusion_coefficient();
    const double torig = original_time();
    double betav = 0.0;
    switch (problem_.kind) {
      case ProblemKind::nonlocal:
        betav = problem_.forcing.beta_at(t_);
        break;
      case ProblemKind::time_changed:
        betav = problem_.forcing.beta_at(torig);
        break;
      default:
        break;
    }
    const double lambda = problem_.forcing.lambda;
    scratch_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double u = vals_[static_cast<size_t>(i)];
      double f;
      switch (problem_.kind) {
        case ProblemKind::nonlocal:
          f = lambda * u - betav * u * u * u;
          break;
        case ProblemKind::time_changed:
          f = (lambda * u - betav * u * u * u) / a_val_;
          break;
        case ProblemKind::local_upper:
          f = lambda * u - 0.5 * problem_.forcing.b1 * u * u * u;
          break;
        case ProblemKind::local_lower:
          f = 0.5 * lambda * u - problem_.forcing.b2 * u * u * u;
          break;
        case ProblemKind::autonomous_nonlocal:
          f = lambda * u - problem_.forcing.b1 * u * u * u;
          break;
      }
      scratch_[static_cast<size_t>(i)] = u + dt_step * (f + g * u);
    }
    detail::sine_coeffs(scratch_, new_modes_);
    if (dt_step != cached_dt_ || c != cached_c_) {
      inv_denom_.resize(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k)
        inv_denom_[static_cast<size_t>(k)] =
            1.0 / (1.0 + dt_step * (g + c * mu_tilde_[static_cast<size_t>(k)]));
      cached_dt_ = dt_step;
      cached_c_ = c;
    }
    for (int k = 0; k < n; ++k) new_modes_[static_cast<size_t>(k)] *= inv_denom_[static_cast<size_t>(k)];
    detail::sine_values(new_modes_, scratch_);
    for (double v : scratch_)
      if (!std::isfinite(v) || std::fabs(v) > opt_.blowup_threshold) {
        blown_ = true;
        return false;
      }
    vals_.swap(scratch_);
    modes_.swap(new_modes_);
    double norm_new = weighted_norm(kw2_);
    double a_new = problem_.diffusivity(norm_new);
    // companion clock: integral of a for forward kinds, of 1/a when running in
    // the changed frame (recovering the original time)
    if (problem_.kind == ProblemKind::time_changed) {
      if (!problem_.reference_map)
        accumulate(*online_torig_, torig_comp_, dt_step * 0.5 * (1.0 / a_val_ + 1.0 / a_new));
    } else {
      accumulate(phi_, phi_comp_, dt_step * 0.5 * (a_val_ + a_new));
    }
    norm_sq_ = norm_new;
    a_val_ = a_new;
    accumulate(t_, t_comp_, dt_step);
    ++steps_;
    return true;
  }

  bool advance() { return advance(dt_); }

  double time() const { return t_; }
  double dt() const { return dt_; }
  long steps() const { return steps_; }
  bool blown_up() const { return blown_; }
  double a_value() const { return a_val_; }
  double h10() const { return norm_sq_; }
  const std::vector<double>& values() const { return vals_; }
  const std::vector<double>& modes() const { return modes_; }
  const Grid& grid() const { return grid_; }
  const ProblemSpec& problem() const { return problem_; }

  // changed-time clock for forward kinds; identity elapsed for local kinds
  double phi() const { return phi_; }

  // what a trajectory records alongside the integration clock: phi when
  // integrating forward, the recovered original time in the changed frame
  double companion_clock() const {
    return problem_.kind == ProblemKind::time_changed ? original_time() : phi_;
  }

  // original-time clock when integrating in the changed frame
  double original_time() const {
    if (problem_.kind != ProblemKind::time_changed) return t_;
    if (problem_.reference_map) return problem_.reference_map->t_at(t_);
    return *online_torig_;
  }

  Profile current_profile() const {
    Profile p;
    p.grid = grid_;
    p.values = vals_;
    p.modes = modes_;
    return p;
  }

 private:
  double diffusion_coefficient() const {
    switch (problem_.kind) {
      case ProblemKind::nonlocal:
      case ProblemKind::autonomous_nonlocal:
        return a_val_;
      default:
        return 1.0;
    }
  }

  double weighted_norm(const std::vector<double>& w) const {
    double s = 0.0;
    for (size_t k = 0; k < modes_.size(); ++k) s += w[k] * modes_[k] * modes_[k];
    return s * (grid_.length / 2.0);
  }

  ProblemSpec problem_;
  Grid grid_;
  double dt_;
  // compensated accumulation: the naive running sum drifts by ~1e-10 over 1e6
  // steps, which is visible when comparing runs of different lengths against
  // the same forcing
  static void accumulate(double& sum, double& comp, double inc) {
    double y = inc - comp;
    double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }

  StepOptions opt_;
  double t_;
  double t_comp_ = 0.0;
  double phi_ = 0.0;
  double phi_comp_ = 0.0;
  double torig_comp_ = 0.0;
  std::optional<double> online_torig_;
  double norm_sq_ = 0.0;
  double a_val_ = 1.0;
  long steps_ = 0;
  bool blown_ = false;
  std::vector<double> vals_, modes_, scratch_, new_modes_, kw2_, mu_tilde_, inv_denom_;
  double cached_dt_ = -1.0, cached_c_ = -1.0;
};

// single semi-implicit step; throws on blow-up
inline Profile step(const Profile& u, double t, double dt, const ProblemSpec& problem,
                    StepOptions opt = {}) {
  Stepper st(u, t, problem, dt, opt);
  if (!st.advance())
    throw numerical_error("blow-up in a single step at t=" + std::to_string(t));
  return st.current_profile();
}

struct Trajectory {
  ProblemSpec problem;
  double start_time = 0.0, end_time = 0.0, dt = defaults::dt;
  int sample_every = 1;
  std::vector<double> times;     // sampled times (integration clock)
  std::vector<double> phi;       // companion clock at the samples
  std::vector<Profile> profiles; // sampled states, modes attached
  TimeMapPolyline dense_phi;     // companion clock at every step
  enum class Status { ok, blowup };
  Status status = Status::ok;
  long blowup_step = -1;
};

namespace detail {
inline long full_steps(double s, double t, double dt, double& remainder) {
  double span = t - s;
  long n = static_cast<long>(std::floor(span / dt + 1e-9));
  remainder = span - n * dt;
  if (remainder < 1e-12 * dt) remainder = 0.0;
  return n;
}
}  // namespace detail

// Integrate from s to t, recording every sample_every-th step plus both ends.
// dt is used verbatim except for one shortened final step when t - s is not a
// multiple of it.
inline Trajectory evolve(const Profile& u0, double s, double t, double dt,
                         const ProblemSpec& problem, int sample_every = 1, StepOptions opt = {}) {
  require(t >= s, "evolve needs t >= s");
  require(sample_every >= 1, "sample_every must be >= 1");
  Trajectory traj;
  traj.problem = problem;
  traj.start_time = s;
  traj.end_time = t;
  traj.dt = dt;
  traj.sample_every = sample_every;
  Stepper st(u0, s, problem, dt, opt);
  double rem = 0.0;
  long nfull = detail::full_steps(s, t, dt, rem);
  traj.dense_phi.push(st.time(), st.companion_clock());
  auto sample = [&] {
    traj.times.push_back(st.time());
    traj.phi.push_back(st.companion_clock());
    traj.profiles.push_back(st.current_profile());
  };
  sample();
  for (long k = 1; k <= nfull; ++k) {
    if (!st.advance()) {
      traj.status = Trajectory::Status::blowup;
      traj.blowup_step = st.steps();
      sample();  // last finite state
      return traj;
    }
    traj.dense_phi.push(st.time(), st.companion_clock());
    if (k % sample_every == 0 && !(k == nfull && rem == 0.0)) sample();
  }
  if (rem > 0.0) {
    if (!st.advance(rem)) {
      traj.status = Trajectory::Status::blowup;
      traj.blowup_step = st.steps();
      sample();
      return traj;
    }
    traj.dense_phi.push(st.time(), st.companion_clock());
  }
  if (nfull > 0 || rem > 0.0) sample();
  return traj;
}

inline const TimeMapPolyline& time_map(const Trajectory& traj) { return traj.dense_phi; }

// t with phi(t) = tau along the recorded run; refuses extrapolation
inline double invert_time_map(const Trajectory& traj, double tau) {
  return traj.dense_phi.t_at(tau);
}

struct EquivalenceReport {
  std::vector<double> sample_times;     // original-time comparison points
  std::vector<double> discrepancies;    // sup-norm gaps at those points
  double max_discrepancy = 0.0;
  double phi_span = 0.0;
};

// Run the nonlocal problem directly, then rerun it in the changed time using
// the recorded clock, and compare u(., t_k) with w(., phi(t_k)).
inline EquivalenceReport check_equivalence_timechange(const Profile& u0, double s, double t,
                                                      double dt, const ProblemSpec& problem,
                                                      int compare_points = 10) {
  require(problem.kind == ProblemKind::nonlocal, "equivalence check expects the nonlocal kind");
  require(compare_points >= 1, "need at least one comparison point");
  double rem = 0.0;
  long nfull = detail::full_steps(s, t, dt, rem);
  long stride = std::max(1l, nfull / compare_points);
  Trajectory direct = evolve(u0, s, t, dt, problem, static_cast<int>(stride));
  if (direct.status != Trajectory::Status::ok)
    throw numerical_error("reference run blew up; equivalence undefined");

  // the stored map carries (t, phi) pairs; t_at(tau) inverts it, which is how
  // the changed-frame stepper recovers the original time for beta
  ProblemSpec changed = ProblemSpec::time_changed(problem.diffusivity, problem.forcing,
                                                  direct.dense_phi);

  EquivalenceReport rep;
  rep.phi_span = direct.phi.back();
  Stepper w(u0, 0.0, changed, dt);
  // phi values are recorded relative to s, so shift the stored map onto the
  // stepper's tau axis
  size_t next = 1;
  for (; next < direct.times.size(); ++next) {
    double tau_target = direct.phi[next];
    while (w.time() < tau_target - 1e-12) {
      double step_dt = std::min(dt, tau_target - w.time());
      if (!w.advance(step_dt)) throw numerical_error("changed-frame run blew up");
    }
    double gap = 0.0;
    const auto& uw = w.values();
    const auto& ud = direct.profiles[next].values;
    for (size_t i = 0; i < uw.size(); ++i) gap = std::max(gap, std::fabs(uw[i] - ud[i]));
    rep.sample_times.push_back(direct.times[next]);
    rep.discrepancies.push_back(gap);
    rep.max_discrepancy = std::max(rep.max_discrepancy, gap);
  }
  return rep;
}

}  // namespace kci
