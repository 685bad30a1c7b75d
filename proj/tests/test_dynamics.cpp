#include <doctest.h>

#include "koopmon/dynamics.hpp"
#include "koopmon/errors.hpp"
#include "koopmon/sampling.hpp"
#include "test_util.hpp"

using namespace koopmon;
using namespace koopmon::testing;

namespace {

const CouplingSetup kSetup{KernelSpec{0.5}, GridParams{}};

HybridHamiltonian harmonic() {
  return HybridHamiltonian(
      "harmonic", 1.0, [](double q, double p) { return 0.5 * (p * p + q * q); },
      [](double q, double) { return q; }, [](double, double p) { return p; },
      [](double) { return PauliVector{}; }, [](double) { return PauliVector{}; }, true);
}

HybridHamiltonian spin_only(double c0) {
  return HybridHamiltonian(
      "spin", 1.0, [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, [c0](double) { return PauliVector{0, c0, 0, 0}; },
      [](double) { return PauliVector{}; }, true);
}

}  // namespace

TEST_CASE("rhs matches finite-difference gradients of the energy") {
  for (Method m : {Method::ehrenfest, Method::koopmon, Method::bohmion}) {
    for (const auto& [h, e] : {std::pair{make_tully(TullyVariant::I), tully_four()},
                              std::pair{make_rabi(RabiRegime::ultrastrong), rabi_four()}}) {
      CAPTURE(to_string(m));
      CAPTURE(h.name());
      const GradientCheck r = check_gradient(m, e, h, kSetup);
      CHECK(r.dq < 1e-5);
      CHECK(r.dp < 1e-5);
      CHECK(r.quantum < 1e-5);
    }
  }
}

TEST_CASE("derivative of rho is traceless and Hermitian") {
  const auto h = make_tully(TullyVariant::I);
  const EnsembleDerivative d = rhs(Method::koopmon, tully_four(), h, kSetup);
  for (const auto& r : d.drho) {
    CHECK(std::abs(r.trace()) < 1e-12);
    CHECK(max_abs(r - r.adjoint()) < 1e-12);
  }
}

TEST_CASE("Ehrenfest derivative at the Tully I start") {
  const auto h = make_tully(TullyVariant::I);
  const ParticleEnsemble e =
      ParticleEnsemble::uniform({-8.0}, {10.0}, projector({cplx{1.0}, cplx{0.0}}));
  const EnsembleDerivative d = rhs(Method::ehrenfest, e, h, kSetup);
  CHECK(d.dq[0] == doctest::Approx(0.005).epsilon(1e-14));
  // -d/dq <e1|H|e1> with H3 = -a (1 - e^{bq}) on the left branch.
  const double a = 0.01, b = 1.6;
  CHECK(d.dp[0] == doctest::Approx(-a * b * std::exp(-b * 8.0)).epsilon(1e-10));
  CHECK(energy(Method::ehrenfest, e, h, kSetup) ==
        doctest::Approx(0.025 - a * (1.0 - std::exp(-b * 8.0))).epsilon(1e-12));
}

TEST_CASE("single koopmon is Ehrenfest; bohmion is not") {
  const auto h = make_tully(TullyVariant::I);
  const ParticleEnsemble e = ParticleEnsemble::uniform({-0.3}, {10.0}, pure_state(0.8, 0.4));
  const EnsembleDerivative k = rhs(Method::koopmon, e, h, kSetup);
  const EnsembleDerivative f = rhs(Method::ehrenfest, e, h, kSetup);
  CHECK(k.dq[0] == f.dq[0]);
  CHECK(k.dp[0] == f.dp[0]);
  CHECK(max_abs(k.drho[0] - f.drho[0]) == 0.0);
  const double eb = energy(Method::bohmion, e, h, kSetup);
  const double ee = energy(Method::ehrenfest, e, h, kSetup);
  CHECK(eb > ee);
  CHECK(eb - ee == doctest::Approx(bohmion_coupling(e, h.mass(),
                                                    method_grid(Method::bohmion, e, kSetup).q,
                                                    kSetup.kernel, false)
                                       .energy));
}

TEST_CASE("equal density matrices: koopmon energy equals Ehrenfest energy") {
  const auto h = make_tully(TullyVariant::I);
  ParticleEnsemble e = tully_four();
  for (auto& r : e.rho) r = pure_state(0.9, 0.1);
  CHECK(energy(Method::koopmon, e, h, kSetup) ==
        doctest::Approx(energy(Method::ehrenfest, e, h, kSetup)).epsilon(1e-14));
}

TEST_CASE("RK4 on the harmonic oscillator") {
  const ParticleEnsemble e0 = ParticleEnsemble::uniform({1.0}, {0.0}, Mat2::identity() * 0.5);
  const ParticleEnsemble e1 = rk4_step(Method::ehrenfest, e0, harmonic(), kSetup, 0.1);
  // local error of RK4 on a rotation: dt^5 / 120
  CHECK(std::abs(e1.q[0] - std::cos(0.1)) < 1e-8);
  CHECK(std::abs(e1.p[0] + std::sin(0.1)) < 1.1 * std::pow(0.1, 5) / 120.0);
}

TEST_CASE("RK4 on a pure spin rotation") {
  const double c0 = 0.35, dt = 0.05;
  const auto h = spin_only(c0);
  ParticleEnsemble e = ParticleEnsemble::uniform({0.0}, {0.0}, projector({cplx{1.0}, cplx{0.0}}));
  const DensityMatrix2 start = e.rho[0];
  for (int s = 1; s <= 40; ++s) {
    const double before = purity(e.rho[0]);
    e = rk4_step(Method::ehrenfest, e, h, kSetup, dt);
    CHECK(std::abs(purity(e.rho[0]) - before) < 1e-10);
    const Mat2 U = unitary_exp({0, c0, 0, 0}, s * dt);
    CHECK(max_abs(e.rho[0] - U * start * U.adjoint()) < 1e-8);
  }
}

TEST_CASE("zero Hamiltonian leaves the state unchanged") {
  const HybridHamiltonian zero(
      "zero", 1.0, [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, [](double) { return PauliVector{}; },
      [](double) { return PauliVector{}; }, true);
  const ParticleEnsemble e = tully_four();
  for (Method m : {Method::ehrenfest, Method::koopmon}) {
    const ParticleEnsemble n = rk4_step(m, e, zero, kSetup, 0.7);
    CHECK(n.q == e.q);
    CHECK(n.p == e.p);
    for (std::size_t a = 0; a < e.size(); ++a) CHECK(max_abs(n.rho[a] - e.rho[a]) < 1e-15);
  }
}

TEST_CASE("snapshot step matching") {
  CHECK(nearest_step(0.0, 2.0) == 0);
  CHECK(nearest_step(1280.0, 2.0) == 640);
  CHECK(nearest_step(3.0, 2.0) == 1);  // tie goes to the earlier step
  CHECK(nearest_step(3.1, 2.0) == 2);
  CHECK(nearest_step(10.5, 0.05) == 210);
  CHECK(step_count(25.0, 0.05) == 500);
}

TEST_CASE("propagate records every step and delivers snapshots") {
  const auto h = make_tully(TullyVariant::I);
  InitSpec s;
  s.mu_q = -8.0;
  s.mu_p = 10.0;
  s.sigma_q = std::sqrt(2.0);
  s.n = 10;
  const ParticleEnsemble e0 = init_ensemble(s);
  PropagationSettings ps;
  ps.dt = 2.0;
  ps.t_final = 20.0;
  ps.snapshot_times = {0.0, 5.0, 20.0};
  std::vector<double> ts, snaps;
  PropagationObserver obs;
  obs.on_record = [&](const DiagnosticsRecord& r) { ts.push_back(r.t); };
  obs.on_snapshot = [&](double, double t, const ParticleEnsemble& e) {
    snaps.push_back(t);
    CHECK(validate(e, ValidationTolerance::uniform(1e-8)).empty());
  };
  const PropagationResult r = propagate(Method::koopmon, e0, h, kSetup, ps, obs);
  CHECK(ts.size() == 11);
  CHECK(snaps == std::vector<double>{0.0, 4.0, 20.0});
  CHECK(r.steps == 10);
  CHECK(r.max_drift < 1e-6);

  PropagationSettings zero = ps;
  zero.t_final = 0.0;
  zero.snapshot_times = {0.0};
  ts.clear();
  snaps.clear();
  propagate(Method::koopmon, e0, h, kSetup, zero, obs);
  CHECK(ts.size() == 1);

  PropagationSettings bad = ps;
  bad.snapshot_times = {30.0};
  CHECK_THROWS_AS(propagate(Method::koopmon, e0, h, kSetup, bad), SolverError);
}

TEST_CASE("energy drift beyond ten times the tolerance aborts") {
  const auto h = make_rabi(RabiRegime::ultrastrong);
  const ParticleEnsemble e0 =
      ParticleEnsemble::uniform({0.0}, {4.0}, projector({cplx{1.0}, cplx{0.0}}));
  PropagationSettings ps;
  ps.dt = 3.0;  // far beyond RK4 stability for unit frequency
  ps.t_final = 300.0;
  ps.drift_tolerance = 1e-4;
  CHECK_THROWS_AS(propagate(Method::ehrenfest, e0, h, kSetup, ps), EnergyDriftError);
}

TEST_CASE("method names") {
  CHECK(parse_method("koopmon") == Method::koopmon);
  CHECK(to_string(Method::bohmion) == "bohmion");
  CHECK_THROWS_AS(parse_method("soft"), ConfigError);
}
