#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "doctest.h"
#include "oos/angles.hpp"
#include "oos/trajectory.hpp"

using namespace oos;

namespace {

constexpr double kDay = 86400.0;
constexpr double kR = 42164e3;
constexpr double kMu = 3.986004418e14;
constexpr double kG0 = 9.80665;

// Phase drift accumulated by the accelerate/coast/decelerate profile, found
// by stepping the mean-motion offset dn/dt = -3F/(m r) through each arc.
double simulated_drift(double m0, double tau, double tf, double r, double thrust) {
  const double rate = 3.0 * thrust / (m0 * r);
  const std::pair<double, double> arcs[] = {{tau, rate}, {tf - 2 * tau, 0.0}, {tau, -rate}};
  double dn = 0.0, drift = 0.0;
  for (const auto& [len, acc] : arcs) {
    const int n = 1000;
    const double h = len / n;
    for (int i = 0; i < n; ++i) {
      drift += (dn + 0.5 * acc * h) * h;
      dn += acc * h;
    }
  }
  return drift;
}

TrajectoryQuery fig6() {
  TrajectoryQuery q;
  q.from_longitude = 180;
  q.to_longitude = 0;
  q.time_of_flight = 8 * kDay;
  q.thrust = 1.16;
  q.isp = 1790;
  q.mass_min = 500;
  q.mass_max = 4000;
  return q;
}

}  // namespace

TEST_SUITE("trajectory") {
  TEST_CASE("low-thrust mass bound for a half-orbit phasing in eight days") {
    const double mub = lt_mass_upper_bound(std::numbers::pi, 8 * kDay, kR, 1.16);
    CHECK(std::abs(mub - 3138.0) <= 1.0);
  }

  TEST_CASE("burn time reproduces the requested drift") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      const double dtheta = (0.05 + 3.0 * u(rng)) * (u(rng) < 0.5 ? -1 : 1);
      const double tf = (2 + 30 * u(rng)) * kDay;
      const double thrust = 0.2 + u(rng);
      const double m0 = 200 + u(rng) * (lt_mass_upper_bound(dtheta, tf, kR, thrust) - 200) * 0.999;
      if (m0 <= 200) continue;
      const double tau = lt_burn_time(m0, dtheta, tf, kR, thrust);
      CHECK(tau > 0.0);
      CHECK(tau <= tf / 2);
      CHECK(simulated_drift(m0, tau, tf, kR, thrust) == doctest::Approx(std::abs(dtheta)).epsilon(1e-9));
    }
  }

  TEST_CASE("burn time at the mass bound is half the flight") {
    const double tf = 8 * kDay;
    const double mub = lt_mass_upper_bound(1.0, tf, kR, 1.16);
    CHECK(lt_burn_time(mub, 1.0, tf, kR, 1.16) == doctest::Approx(tf / 2));
    CHECK_THROWS_AS(lt_burn_time(mub * 1.001, 1.0, tf, kR, 1.16), InfeasibleTrajectory);
  }

  TEST_CASE("propellant is two burns at the mass flow rate") {
    const double tau = lt_burn_time(2000, 2.0, 10 * kDay, kR, 1.16);
    CHECK(lt_propellant(2000, 2.0, 10 * kDay, kR, 1.16, 1790, kG0) == doctest::Approx(2 * 1.16 * tau / (kG0 * 1790)));
  }

  TEST_CASE("zero separation gives a flat zero curve") {
    TrajectoryQuery q = fig6();
    q.to_longitude = q.from_longitude;
    CHECK(std::isinf(lt_mass_upper_bound(0.0, q.time_of_flight, kR, q.thrust)));
    const auto m = lt_model(q, 20);
    CHECK(m.linear);
    CHECK(m.coefficient == 0.0);
    REQUIRE(m.breakpoints.size() == 20);
    CHECK(m.breakpoints.front().m0 == 500.0);
    CHECK(m.breakpoints.back().m0 == 4000.0);
    for (const auto& b : m.breakpoints) CHECK(b.mp == 0.0);
  }

  TEST_CASE("low-thrust breakpoints stop at the mass bound") {
    const auto m = lt_model(fig6(), 20);
    CHECK(m.delta_theta == doctest::Approx(std::numbers::pi));
    CHECK(m.breakpoints.back().m0 == doctest::Approx(m.mass_upper_bound));
    CHECK(m.mass_upper_bound < 4000.0);
    for (std::size_t i = 1; i < m.breakpoints.size(); ++i) {
      CHECK(m.breakpoints[i].m0 > m.breakpoints[i - 1].m0);
      CHECK(m.breakpoints[i].mp > m.breakpoints[i - 1].mp);
    }
  }

  TEST_CASE("chords lie above the convex propellant curve") {
    const TrajectoryQuery q = fig6();
    const auto m = lt_model(q, 20);
    const double hi = m.breakpoints.back().m0;
    for (int i = 0; i <= 500; ++i) {
      const double m0 = 500 + (hi - 500) * i / 500.0;
      const double exact = lt_propellant(m0, m.delta_theta, q.time_of_flight, q.radius, q.thrust, q.isp, q.g0);
      CHECK(m.interpolate(m0) >= exact - 1e-9);
    }
  }

  TEST_CASE("mass bound below the minimum mass is infeasible") {
    TrajectoryQuery q = fig6();
    q.time_of_flight = 2 * kDay;
    CHECK_THROWS_AS(lt_model(q, 20), InfeasibleTrajectory);
  }

  TEST_CASE("phasing candidates respect time and perigee limits") {
    const double alpha = deg_to_rad(100);
    const double tmax = 6 * kDay;
    const auto cands = ht_enumerate(alpha, kR, tmax, 6578e3, kMu);
    REQUIRE_FALSE(cands.empty());
    for (const auto& c : cands) {
      CHECK(c.tf <= tmax);
      CHECK(c.a >= 0.5 * (kR + 6578e3));
      // k1 revolutions of the phasing orbit last as long as the sweep of the target.
      const double period = 2 * std::numbers::pi * std::sqrt(c.a * c.a * c.a / kMu);
      CHECK(c.k1 * period == doctest::Approx(c.tf).epsilon(1e-12));
      CHECK(c.dv == doctest::Approx(ht_delta_v(kR, c.a, kMu)));
    }
  }

  TEST_CASE("high-thrust model picks the cheapest phasing") {
    TrajectoryQuery q = fig6();
    q.time_of_flight = 2 * kDay;
    q.isp = 316;
    const auto m = ht_model(q);
    auto cands = ht_enumerate(std::numbers::pi, kR, q.time_of_flight, q.forbidden_radius, q.mu);
    for (const auto& c : cands) CHECK(m.delta_v <= c.dv);
    CHECK(m.linear);
    CHECK(m.chosen.k1 == 2);
    CHECK(m.chosen.k2 == 1);
    CHECK(m.delta_v == doctest::Approx(688.579).epsilon(1e-5));
    CHECK(m.coefficient == doctest::Approx(1.0 - std::exp(-m.delta_v / (kG0 * 316))));
    CHECK(m.interpolate(3000.0) == doctest::Approx(m.coefficient * 3000.0));
  }

  TEST_CASE("no phasing fits a very short flight") {
    TrajectoryQuery q = fig6();
    q.time_of_flight = 0.2 * kDay;
    CHECK_THROWS_AS(ht_model(q), InfeasibleTrajectory);
  }

  TEST_CASE("phase angles") {
    CHECK(phase_angle(10, 350) == doctest::Approx(deg_to_rad(20)));
    CHECK(phase_angle(350, 10) == doctest::Approx(deg_to_rad(340)));
    CHECK(signed_phase_angle(350, 10) == doctest::Approx(deg_to_rad(-20)));
    CHECK(signed_phase_angle(0, 180) == doctest::Approx(std::numbers::pi));
  }

  TEST_CASE("interpolation") {
    const auto pts = linearize([](double x) { return x * x; }, 0, 4, 5);
    CHECK(pts.size() == 5);
    CHECK(interpolate(pts, 2.5) == doctest::Approx(6.5));
    CHECK(interpolate(pts, 4.0) == 16.0);
    CHECK_THROWS(interpolate(pts, 4.1));
    const auto g = linearize_graded([](double x) { return x; }, 0, 1, 5);
    CHECK(g.front().m0 == 0.0);
    CHECK(g.back().m0 == 1.0);
    CHECK(g[4].m0 - g[3].m0 < g[1].m0 - g[0].m0);
  }

  TEST_CASE("registry dispatches custom plugins") {
    PluginRegistry reg = PluginRegistry::with_defaults();
    CHECK(reg.contains(PropulsionKind::high_thrust, "phasing"));
    CHECK_FALSE(reg.contains(PropulsionKind::low_thrust, "spiral"));
    reg.add(PropulsionKind::low_thrust, "spiral", [](const TrajectoryQuery& q) {
      TrajectoryModel m;
      m.kind = PropulsionKind::low_thrust;
      m.breakpoints = {{q.mass_min, 1.0}, {q.mass_max, 2.0}};
      m.mass_upper_bound = q.mass_max;
      return m;
    });
    const auto m = reg.evaluate(PropulsionKind::low_thrust, "spiral", fig6());
    CHECK(m.interpolate(2250.0) == doctest::Approx(1.5));
    CHECK_THROWS(reg.evaluate(PropulsionKind::high_thrust, "spiral", fig6()));
  }

  TEST_CASE("model cache shares results and remembers infeasibility") {
    ModelCache cache;
    int calls = 0;
    const ModelCache::Key k{"svc", 0, 8, 12345};
    const int a = cache.get_or_compute(k, [&] { ++calls; return lt_model(fig6(), 5); });
    const int b = cache.get_or_compute(k, [&] { ++calls; return lt_model(fig6(), 5); });
    CHECK(a == b);
    CHECK(calls == 1);
    CHECK(cache.hits() == 1);
    const ModelCache::Key bad{"svc", 0, 1, 12345};
    CHECK(cache.get_or_compute(bad, []() -> TrajectoryModel { throw InfeasibleTrajectory("x"); }) == -1);
    CHECK(cache.get_or_compute(bad, []() -> TrajectoryModel { throw std::logic_error("not called"); }) == -1);
  }
}
