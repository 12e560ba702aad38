#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oos/scenario.hpp"

namespace oos {

/// Raised when no trajectory satisfies the requested time of flight or mass.
class InfeasibleTrajectory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plugin input.  Angles come from node longitudes; SI units throughout
/// except masses (kg) and longitudes (deg).
struct TrajectoryQuery {
  double from_longitude = 0.0;  // servicer, deg
  double to_longitude = 0.0;    // target, deg
  double radius = 42164.0e3;    // m
  double time_of_flight = 0.0;  // s
  double thrust = 0.0;          // N
  double isp = 0.0;             // s
  double g0 = 9.80665;
  double mu = 3.986004418e14;
  double forbidden_radius = 6578.0e3;  // m
  double mass_min = 0.0;
  double mass_max = 0.0;
  int breakpoints = 20;
};

struct Breakpoint {
  double m0 = 0.0;  // initial mass, kg
  double mp = 0.0;  // propellant consumed, kg
};

struct HtCandidate {
  int k1 = 1;
  int k2 = 0;
  double a = 0.0;    // m
  double tf = 0.0;   // s
  double dv = 0.0;   // m/s
};

/// Plugin output: a propellant curve sampled at breakpoints plus the mass
/// above which the arc cannot be flown.
struct TrajectoryModel {
  PropulsionKind kind = PropulsionKind::high_thrust;
  std::vector<Breakpoint> breakpoints;
  double mass_upper_bound = 0.0;
  // Exact when the curve is a line through the origin: mp = coefficient * m0.
  bool linear = false;
  double coefficient = 0.0;
  // Details of the chosen maneuver, for reports.
  double delta_v = 0.0;
  HtCandidate chosen;
  double delta_theta = 0.0;  // rad, signed

  /// Piecewise-linear interpolation of the breakpoints.  Throws outside them.
  double interpolate(double m0) const;
};

/// Feasible (k1, k2) phasing pairs for target-to-servicer angle `alpha`.
std::vector<HtCandidate> ht_enumerate(double alpha, double r, double t_max, double r_forb, double mu);

/// Characteristic velocity of a two-impulse phasing orbit of semi-major axis `a`.
double ht_delta_v(double r, double a, double mu);

TrajectoryModel ht_model(const TrajectoryQuery& query);

/// Largest initial mass for which a constant-thrust phasing of `dtheta`
/// completes in `tf`.  Infinite when dtheta is zero.
double lt_mass_upper_bound(double dtheta, double tf, double r0, double thrust);

/// Thrust duration of the first (and last) burn.  Throws above the mass bound.
double lt_burn_time(double m0, double dtheta, double tf, double r0, double thrust);

/// Propellant of the accelerate/coast/decelerate profile.
double lt_propellant(double m0, double dtheta, double tf, double r0, double thrust, double isp, double g0);

TrajectoryModel lt_model(const TrajectoryQuery& query, int n_breakpoints);

/// Samples `fn` at `n` uniformly spaced points covering [lo, hi].
std::vector<Breakpoint> linearize(const std::function<double(double)>& fn, double lo, double hi, int n);

/// Samples `fn` at `n` points whose spacing shrinks toward `hi` by the
/// square-root law, which suits curves with a vertical tangent at `hi`.
std::vector<Breakpoint> linearize_graded(const std::function<double(double)>& fn, double lo, double hi, int n);

/// Evaluates piecewise-linear interpolation through `pts` at x.
double interpolate(const std::vector<Breakpoint>& pts, double x);

using TrajectoryPlugin = std::function<TrajectoryModel(const TrajectoryQuery&)>;

/// Plugins keyed by propulsion kind and trajectory option name.  The default
/// registry holds the two phasing models under option "phasing".
class PluginRegistry {
 public:
  static PluginRegistry with_defaults();

  void add(PropulsionKind kind, const std::string& option, TrajectoryPlugin plugin);
  bool contains(PropulsionKind kind, const std::string& option) const;
  TrajectoryModel evaluate(PropulsionKind kind, const std::string& option, const TrajectoryQuery& q) const;

 private:
  std::map<std::pair<PropulsionKind, std::string>, TrajectoryPlugin> plugins_;
};

/// Thread-safe memo of plugin results.  Arcs share a model whenever design,
/// propulsion option, duration and phase angle agree.
class ModelCache {
 public:
  struct Key {
    std::string design;
    int option = 0;
    int q = 0;
    long long angle_nano = 0;  // phase angle in nanoradians
    auto operator<=>(const Key&) const = default;
  };

  /// Returns the index of a stored model, computing it on first use.  A
  /// plugin that reports InfeasibleTrajectory yields -1.
  int get_or_compute(const Key& key, const std::function<TrajectoryModel()>& compute);
  const TrajectoryModel& at(int index) const { return models_.at(static_cast<std::size_t>(index)); }
  std::vector<TrajectoryModel> release();
  std::size_t hits() const { return hits_; }

 private:
  mutable std::mutex mu_;
  std::map<Key, int> index_;
  std::vector<TrajectoryModel> models_;
  std::size_t hits_ = 0;
};

}  // namespace oos
