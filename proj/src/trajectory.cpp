#include "oos/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oos/angles.hpp"

namespace oos {

namespace {

void check_mass_range(const TrajectoryQuery& q) {
  if (!(q.mass_min >= 0) || !(q.mass_max > q.mass_min))
    throw std::invalid_argument("trajectory query needs 0 <= mass_min < mass_max");
  if (!(q.time_of_flight > 0)) throw std::invalid_argument("trajectory query needs time_of_flight > 0");
}

}  // namespace

double TrajectoryModel::interpolate(double m0) const { return oos::interpolate(breakpoints, m0); }

double interpolate(const std::vector<Breakpoint>& pts, double x) {
  if (pts.empty()) throw std::invalid_argument("no breakpoints");
  const double tol = 1e-9 * std::max(1.0, std::abs(pts.back().m0));
  if (x < pts.front().m0 - tol || x > pts.back().m0 + tol)
    throw std::out_of_range("mass outside the breakpoint range");
  if (pts.size() == 1) return pts.front().mp;
  auto it = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const Breakpoint& b) { return v < b.m0; });
  std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - pts.begin()), 1, pts.size() - 1);
  const auto& a = pts[hi - 1];
  const auto& b = pts[hi];
  double t = (x - a.m0) / (b.m0 - a.m0);
  return a.mp + t * (b.mp - a.mp);
}

double ht_delta_v(double r, double a, double mu) {
  return 2.0 * std::abs(std::sqrt(mu / r) - std::sqrt(mu * (2.0 / r - 1.0 / a)));
}

std::vector<HtCandidate> ht_enumerate(double alpha, double r, double t_max, double r_forb, double mu) {
  std::vector<HtCandidate> out;
  if (!(t_max > 0)) return out;
  if (alpha == 0.0) {
    // Co-located: no maneuver is needed.
    out.push_back({1, 0, r, 0.0, 0.0});
    return out;
  }
  const double n_inv = std::sqrt(r * r * r / mu);
  const double a_min = 0.5 * (r + r_forb);
  for (int k2 = 0;; ++k2) {
    const double sweep = alpha + kTwoPi * k2;
    const double tf = sweep * n_inv;
    if (tf > t_max) break;
    for (int k1 = 1;; ++k1) {
      const double a = std::pow(sweep / (kTwoPi * k1), 2.0 / 3.0) * r;
      if (a < a_min) break;
      out.push_back({k1, k2, a, tf, ht_delta_v(r, a, mu)});
    }
  }
  return out;
}

TrajectoryModel ht_model(const TrajectoryQuery& q) {
  check_mass_range(q);
  const double alpha = phase_angle(q.from_longitude, q.to_longitude);
  auto cands = ht_enumerate(alpha, q.radius, q.time_of_flight, q.forbidden_radius, q.mu);
  if (cands.empty()) throw InfeasibleTrajectory("no phasing orbit fits the time of flight");
  auto best = std::min_element(cands.begin(), cands.end(), [](const HtCandidate& x, const HtCandidate& y) {
    if (x.dv != y.dv) return x.dv < y.dv;
    if (x.tf != y.tf) return x.tf < y.tf;
    return x.k1 < y.k1;
  });
  TrajectoryModel m;
  m.kind = PropulsionKind::high_thrust;
  m.chosen = *best;
  m.delta_v = best->dv;
  m.linear = true;
  m.coefficient = -std::expm1(-best->dv / (q.g0 * q.isp));
  m.breakpoints = {{q.mass_min, m.coefficient * q.mass_min}, {q.mass_max, m.coefficient * q.mass_max}};
  m.mass_upper_bound = q.mass_max;
  m.delta_theta = alpha;
  return m;
}

double lt_mass_upper_bound(double dtheta, double tf, double r0, double thrust) {
  if (dtheta == 0.0) return std::numeric_limits<double>::infinity();
  return 3.0 * thrust * tf * tf / (4.0 * r0 * std::abs(dtheta));
}

double lt_burn_time(double m0, double dtheta, double tf, double r0, double thrust) {
  if (dtheta == 0.0) return 0.0;
  const double c = r0 * m0 * std::abs(dtheta) / (3.0 * thrust);
  double disc = tf * tf - 4.0 * c;
  if (disc < 0) {
    if (disc < -1e-12 * tf * tf) throw InfeasibleTrajectory("initial mass above the low-thrust mass bound");
    disc = 0;
  }
  // Smaller root written as 2c / (tf + sqrt(disc)) to avoid cancellation.
  return 2.0 * c / (tf + std::sqrt(disc));
}

double lt_propellant(double m0, double dtheta, double tf, double r0, double thrust, double isp, double g0) {
  const double b = thrust / (g0 * isp);
  return 2.0 * b * lt_burn_time(m0, dtheta, tf, r0, thrust);
}

TrajectoryModel lt_model(const TrajectoryQuery& q, int n_breakpoints) {
  check_mass_range(q);
  if (n_breakpoints < 2) throw std::invalid_argument("at least two breakpoints");
  TrajectoryModel m;
  m.kind = PropulsionKind::low_thrust;
  m.delta_theta = signed_phase_angle(q.from_longitude, q.to_longitude);
  m.mass_upper_bound = lt_mass_upper_bound(m.delta_theta, q.time_of_flight, q.radius, q.thrust);
  if (!(m.mass_upper_bound > q.mass_min))
    throw InfeasibleTrajectory("low-thrust mass bound below the minimum servicer mass");
  const double hi = std::min(q.mass_max, m.mass_upper_bound);
  if (m.delta_theta == 0.0) {
    m.linear = true;
    m.coefficient = 0.0;
  }
  m.breakpoints = linearize(
      [&](double m0) {
        return lt_propellant(std::min(m0, m.mass_upper_bound), m.delta_theta, q.time_of_flight, q.radius,
                             q.thrust, q.isp, q.g0);
      },
      q.mass_min, hi, n_breakpoints);
  return m;
}

std::vector<Breakpoint> linearize(const std::function<double(double)>& fn, double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("at least two breakpoints");
  std::vector<Breakpoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    pts.push_back({x, fn(x)});
  }
  return pts;
}

std::vector<Breakpoint> linearize_graded(const std::function<double(double)>& fn, double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("at least two breakpoints");
  std::vector<Breakpoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double u = 1.0 - static_cast<double>(i) / (n - 1);
    double x = i == n - 1 ? hi : hi - (hi - lo) * u * u;
    pts.push_back({x, fn(x)});
  }
  return pts;
}

PluginRegistry PluginRegistry::with_defaults() {
  PluginRegistry reg;
  reg.add(PropulsionKind::high_thrust, "phasing", [](const TrajectoryQuery& q) { return ht_model(q); });
  reg.add(PropulsionKind::low_thrust, "phasing",
          [](const TrajectoryQuery& q) { return lt_model(q, q.breakpoints); });
  return reg;
}

void PluginRegistry::add(PropulsionKind kind, const std::string& option, TrajectoryPlugin plugin) {
  plugins_[{kind, option}] = std::move(plugin);
}

bool PluginRegistry::contains(PropulsionKind kind, const std::string& option) const {
  return plugins_.contains({kind, option});
}

TrajectoryModel PluginRegistry::evaluate(PropulsionKind kind, const std::string& option,
                                         const TrajectoryQuery& q) const {
  auto it = plugins_.find({kind, option});
  if (it == plugins_.end())
    throw std::invalid_argument("no trajectory plugin for " + to_string(kind) + "/" + option);
  return it->second(q);
}

int ModelCache::get_or_compute(const Key& key, const std::function<TrajectoryModel()>& compute) {
  std::lock_guard lock(mu_);
  if (auto it = index_.find(key); it != index_.end()) {
    ++hits_;
    return it->second;
  }
  int idx = -1;
  try {
    models_.push_back(compute());
    idx = static_cast<int>(models_.size()) - 1;
  } catch (const InfeasibleTrajectory&) {
    idx = -1;
  }
  index_.emplace(key, idx);
  return idx;
}

std::vector<TrajectoryModel> ModelCache::release() {
  std::lock_guard lock(mu_);
  index_.clear();
  return std::move(models_);
}

}  // namespace oos
