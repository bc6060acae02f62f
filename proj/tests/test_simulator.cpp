#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cdde/error.hpp"
#include "cdde/simulator.hpp"
#include "cdde/stability.hpp"
#include "oracles.hpp"

using namespace cdde;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected cdde::Error");
    return ErrorCode::InvalidArgument;
}

std::size_t index_at(const Trajectory& tr, double t) {
    return static_cast<std::size_t>(std::llround(t / tr.step));
}

SimulationScenario scalar_scenario(double a, double psi, double t_end) {
    SimulationScenario sc;
    sc.spec.A = Matrix{{a}};
    sc.spec.B = Matrix{{0}};
    sc.spec.C = Matrix{{0}};
    sc.spec.D = Matrix{{0}};
    sc.spec.h_max = 1.0;
    sc.spec.omega_bar = Vector{0};
    sc.spec.d_bar = Vector{0};
    sc.spec.psi_bar = Vector{psi};
    sc.spec.phi_bar = Vector{0};
    sc.omega = SignalSpec::zero(1);
    sc.d = SignalSpec::zero(1);
    sc.h1 = SignalSpec::constant(Vector{1.0});
    sc.h2 = SignalSpec::constant(Vector{1.0});
    sc.psi = Vector{psi};
    sc.phi = SignalSpec::zero(1);
    sc.t_end = t_end;
    sc.step = 1e-3;
    return sc;
}

double max_abs_sample(const Trajectory& tr) {
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        worst = std::max(worst, norm_inf(tr.x[k]));
        worst = std::max(worst, norm_inf(tr.y[k]));
    }
    return worst;
}

}  // namespace

TEST_CASE("signals evaluate as documented") {
    const SignalSpec s = SignalSpec::const_plus_abs_cos(Vector{1}, Vector{1}, Vector{1});
    CHECK(s.scalar(0.0) == 2.0);
    CHECK(s(M_PI / 2)[0] == doctest::Approx(1.0));
    const SignalSpec w = SignalSpec::abs_sin(Vector{0.5, 0.3}, Vector{0.2, 0.1});
    const Vector v = w(-10.0);
    CHECK(v[0] == doctest::Approx(0.5 * std::abs(std::sin(-2.0))));
    CHECK(v[1] == doctest::Approx(0.3 * std::abs(std::sin(-1.0))));
    CHECK(SignalSpec::zero(2)(3.0) == Vector{0, 0});
    CHECK(w.scaled(2.0)(1.0)[0] == doctest::Approx(2.0 * w(1.0)[0]));
    CHECK(parse_signal_kind("const_plus_abs_sin") == SignalKind::ConstPlusAbsSin);
    CHECK_FALSE(parse_signal_kind("square"));
    CHECK(to_string(SignalKind::AbsCos) == "abs_cos");
    CHECK_THROWS_AS(SignalSpec(SignalKind::AbsSin, Vector{1, 2}, Vector{1}, {}), Error);
}

TEST_CASE("zero data stays at the origin") {
    SimulationScenario sc = demo_scenario(0.0, 0.0, 10.0);
    sc.psi = Vector::zeros(3);
    sc.phi = SignalSpec::zero(2);
    const Trajectory tr = simulate(sc);
    CHECK(tr.size() == 10001);
    CHECK(max_abs_sample(tr) <= 1e-14);
}

TEST_CASE("scalar decay matches exp(-t)") {
    const Trajectory tr = simulate(scalar_scenario(-1.0, 1.0, 1.0));
    CHECK(tr.times.back() == doctest::Approx(1.0));
    CHECK(std::abs(tr.x.back()[0] - std::exp(-1.0)) <= 1e-9);
}

TEST_CASE("grid is uniform and y obeys the difference relation") {
    const SimulationScenario sc = demo_scenario(1.0, 1.0, 5.0);
    const Trajectory tr = simulate(sc);
    for (std::size_t k = 0; k < tr.size(); ++k) CHECK(tr.times[k] == static_cast<double>(k) * 1e-3);
    // at t = 0 the relation takes over from the history
    const Vector y0 = sc.spec.C * sc.psi + sc.spec.D * sc.phi(-sc.h2.scalar(0.0)) + sc.d(0.0);
    CHECK(norm_inf(tr.y[0] - y0) <= 1e-12);
}

TEST_CASE("scenario validation") {
    CHECK(code_of([] { simulate(demo_scenario(2.0, 1.0, 40.0)); }) == ErrorCode::InvalidScenario);
    CHECK(code_of([] { simulate(demo_scenario(1.0, 1.0, 1.0, 3.0)); }) == ErrorCode::InvalidScenario);
    SimulationScenario sc = demo_scenario(1.0, 1.0, 1.0);
    sc.psi = 1.01 * sc.spec.psi_bar;
    CHECK(code_of([&] { simulate(sc); }) == ErrorCode::InvalidScenario);
    sc = demo_scenario(1.0, 1.0, 1.0);
    sc.h1 = SignalSpec::const_plus_abs_sin(Vector{1.5}, Vector{1.0}, Vector{1.0});
    const ValidationReport r = validate_scenario(sc);
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].rfind("h1[0]", 0) == 0);
    sc = demo_scenario(1.0, 1.0, 1.0);
    sc.phi = SignalSpec::constant(Vector{16.0, 1.0});
    CHECK_FALSE(validate_scenario(sc).ok());
}

TEST_CASE("blow-up is reported") {
    SimulationScenario sc = scalar_scenario(1.0, 1.0, 40.0);
    CHECK(code_of([&] { simulate(sc); }) == ErrorCode::UnstableStep);
}

TEST_CASE("zero-delay algebraic branch") {
    // y = 0.25 x + 0.5 y  =>  y = x / 2;  x' = -x + y = -x / 2
    SimulationScenario sc = scalar_scenario(-1.0, 1.0, 1.0);
    sc.spec.B = Matrix{{1}};
    sc.spec.C = Matrix{{0.25}};
    sc.spec.D = Matrix{{0.5}};
    sc.spec.phi_bar = Vector{3};
    sc.phi = SignalSpec::constant(Vector{3});
    sc.h1 = SignalSpec::zero(1);
    sc.h2 = SignalSpec::zero(1);
    const Trajectory tr = simulate(sc);
    CHECK(std::abs(tr.x.back()[0] - std::exp(-0.5)) <= 1e-8);
    for (std::size_t k = 0; k < tr.size(); k += 97) CHECK(tr.y[k][0] == doctest::Approx(0.5 * tr.x[k][0]));

    sc.spec.D = Matrix{{1.5}};
    CHECK(code_of([&] { simulate(sc); }) == ErrorCode::InvalidScenario);
}

TEST_CASE("demo scenario is dominated by the certificate") {
    const BoundCertificate cert = compute_certificate(demo_system());
    const Trajectory tr = simulate(demo_scenario(1.0, 1.0, 40.0));
    CHECK(tr.size() == 40001);
    const DominationReport r = verify_domination(tr, cert);
    CHECK_FALSE(r.violated());
    for (double m : r.x_margin) CHECK(m <= 1e-6);
    for (double m : r.y_margin) CHECK(m <= 1e-6);
}

TEST_CASE("verify_domination examples") {
    const BoundCertificate cert = compute_certificate(demo_system());

    SimulationScenario zero = demo_scenario(0.0, 0.0, 5.0);
    zero.psi = Vector::zeros(3);
    zero.phi = SignalSpec::zero(2);
    const DominationReport z = verify_domination(simulate(zero), cert);
    CHECK_FALSE(z.violated());
    for (std::size_t i = 0; i < 3; ++i) CHECK(z.x_margin[i] == doctest::Approx(-(cert.eta[i] + std::pow(1 - cert.mu, 2) * cert.p[i])));

    for (double a : {0.0, 0.5, 1.0}) {
        for (double b : {0.0, 1.0}) {
            CAPTURE(a);
            CAPTURE(b);
            CHECK_FALSE(verify_domination(simulate(demo_scenario(a, b, 40.0)), cert).violated());
        }
    }

    Trajectory big = simulate(demo_scenario(1.0, 1.0, 10.0));
    for (auto& x : big.x) x *= 10.0;
    for (auto& y : big.y) y *= 10.0;
    const DominationReport v = verify_domination(big, cert);
    REQUIRE(v.violated());
    CHECK(*v.first_violation == 0.0);
    CHECK(v.x_margin[1] > 1.0);
}

TEST_CASE("comparison_check examples") {
    const SimulationScenario hi = demo_scenario(1.0, 1.0, 20.0);
    CHECK(comparison_check(hi, hi));
    SimulationScenario lo = hi;
    lo.psi = 0.5 * hi.spec.psi_bar;
    CHECK(comparison_check(lo, hi));
    CHECK(code_of([&] { comparison_check(hi, lo); }) == ErrorCode::MismatchedScenarios);
    SimulationScenario other = hi;
    other.d = other.d.scaled(0.5);
    CHECK(code_of([&] { comparison_check(other, hi); }) == ErrorCode::MismatchedScenarios);
}

TEST_CASE("constant maximal data from (eta, varsigma) is an equilibrium") {
    const SystemSpec spec = demo_system();
    const UltimateBound ub = ultimate_bound(spec);
    SimulationScenario sc = extreme_scenario(spec, 1.0, 1.0, 20.0);
    sc.h1 = SignalSpec::const_plus_abs_sin(Vector{1}, Vector{1}, Vector{1});
    sc.h2 = SignalSpec::const_plus_abs_cos(Vector{1}, Vector{1}, Vector{1});
    sc.psi = ub.eta;
    sc.phi = SignalSpec::constant(ub.varsigma);
    const Trajectory tr = simulate(sc);
    double dev = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        dev = std::max(dev, norm_inf(tr.x[k] - ub.eta));
        dev = std::max(dev, norm_inf(tr.y[k] - ub.varsigma));
    }
    CHECK(dev <= 1e-6);
}

TEST_CASE("zero initial data approaches eta from below inside the certified squeeze") {
    // eta - x solves the undisturbed system started at (eta, varsigma), so a
    // certificate for that system bounds the gap.
    const SystemSpec spec = demo_system();
    const UltimateBound ub = ultimate_bound(spec);
    SystemSpec gap = spec;
    gap.omega_bar = Vector::zeros(3);
    gap.d_bar = Vector::zeros(2);
    gap.psi_bar = ub.eta;
    gap.phi_bar = ub.varsigma;
    const BoundCertificate gap_cert = compute_certificate(gap);
    REQUIRE_FALSE(gap_cert.constant_bound);

    SimulationScenario sc = demo_scenario(1.0, 1.0, 60.0);
    sc.omega = SignalSpec::constant(spec.omega_bar);
    sc.d = SignalSpec::constant(spec.d_bar);
    sc.psi = Vector::zeros(3);
    sc.phi = SignalSpec::zero(2);
    const Trajectory tr = simulate(sc);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const StateBound g = staircase(gap_cert, tr.times[k]);
        CHECK(cmp_leq(tr.x[k], ub.eta, 1e-9));
        CHECK(cmp_leq(ub.eta - tr.x[k], g.x, 1e-6));
        CHECK(cmp_leq(ub.varsigma - tr.y[k], g.y, 1e-6));
    }
    // the gap shrinks over time
    CHECK(norm_inf(ub.eta - tr.x[index_at(tr, 60.0)]) < norm_inf(ub.eta - tr.x[index_at(tr, 20.0)]));
}

TEST_CASE("property: positivity on random admissible scenarios") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        SimulationScenario sc = demo_scenario(u(rng), u(rng), 10.0);
        sc.psi = Vector{u(rng) * 2, u(rng) * 5, u(rng) * 3};
        sc.phi = SignalSpec::abs_sin(Vector{15 * u(rng), 5 * u(rng)}, Vector{3 * u(rng), 3 * u(rng)});
        const Trajectory tr = simulate(sc);
        double lowest = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            for (double v : tr.x[k]) lowest = std::min(lowest, v);
            for (double v : tr.y[k]) lowest = std::min(lowest, v);
        }
        CHECK(lowest >= -1e-12);
    }
}

TEST_CASE("property: step halving changes samples by at most 1e-6") {
    const Trajectory coarse = simulate(demo_scenario(1.0, 1.0, 10.0, 1e-3));
    const Trajectory fine = simulate(demo_scenario(1.0, 1.0, 10.0, 5e-4));
    for (double t : {1.0, 5.0, 10.0}) {
        CAPTURE(t);
        const std::size_t a = index_at(coarse, t);
        const std::size_t b = index_at(fine, t);
        CHECK(norm_inf(coarse.x[a] - fine.x[b]) <= 1e-6);
        CHECK(norm_inf(coarse.y[a] - fine.y[b]) <= 1e-6);
    }
}

TEST_CASE("property: exact on delay-free decoupled modes") {
    // x_i' = a_i x_i + w_i  =>  x_i(t) = w_i/(-a_i) + (x_i(0) - w_i/(-a_i)) e^{a_i t}
    SimulationScenario sc = scalar_scenario(-1.0, 1.0, 1.0);
    sc.spec.A = Matrix{{-1, 0, 0}, {0, -2, 0}, {0, 0, -0.5}};
    sc.spec.B = Matrix(3, 1);
    sc.spec.C = Matrix(1, 3);
    sc.spec.omega_bar = Vector{1, 0.5, 0};
    sc.spec.psi_bar = Vector{1, 2, 3};
    sc.omega = SignalSpec::constant(sc.spec.omega_bar);
    sc.psi = sc.spec.psi_bar;
    const Trajectory tr = simulate(sc);
    const Vector a{-1, -2, -0.5};
    for (std::size_t i = 0; i < 3; ++i) {
        const double eq = sc.spec.omega_bar[i] / -a[i];
        const double exact = eq + (sc.psi[i] - eq) * std::exp(a[i]);
        CHECK(std::abs(tr.x.back()[i] - exact) <= 1e-8);
    }
}

TEST_CASE("property: monotone in disturbances") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double a1 = u(rng), b1 = u(rng);
        const double a2 = a1 + (1 - a1) * u(rng), b2 = b1 + (1 - b1) * u(rng);
        const Trajectory lo = simulate(demo_scenario(a1, b1, 10.0));
        const Trajectory hi = simulate(demo_scenario(a2, b2, 10.0));
        bool ordered = true;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            ordered = ordered && cmp_leq(lo.x[k], hi.x[k], 1e-9) && cmp_leq(lo.y[k], hi.y[k], 1e-9);
        }
        CHECK(ordered);
    }
}

TEST_CASE("csv writers") {
    const BoundCertificate cert = compute_certificate(demo_system());
    const Trajectory tr = simulate(demo_scenario(1.0, 1.0, 0.002));
    std::ostringstream with, without, stairs;
    write_trajectory_csv(with, tr, &cert);
    write_trajectory_csv(without, tr);
    write_staircase_csv(stairs, cert, 1.0, 0.5);
    const std::string w = with.str(), s = stairs.str();
    std::istringstream in(w);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x_1,x_2,x_3,y_1,y_2,xb_1,xb_2,xb_3,yb_1,yb_2");
    std::getline(in, line);
    CHECK(line.rfind("0,2,5,3,", 0) == 0);
    CHECK(without.str().substr(0, without.str().find('\n')) == "t,x_1,x_2,x_3,y_1,y_2");
    CHECK(std::count(w.begin(), w.end(), '\n') == 4);
    CHECK(s.rfind("t,xb_1,xb_2,xb_3,yb_1,yb_2\n0,3.11999387,", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
