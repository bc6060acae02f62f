#include <doctest.h>

#include <cmath>
#include <random>

#include "cdde/error.hpp"
#include "cdde/stability.hpp"
#include "oracles.hpp"

using namespace cdde;

namespace {

SystemSpec scalar_system(double a, double b, double c, double d) {
    SystemSpec s;
    s.A = Matrix{{a}};
    s.B = Matrix{{b}};
    s.C = Matrix{{c}};
    s.D = Matrix{{d}};
    s.h_max = 1.0;
    s.omega_bar = Vector{0};
    s.d_bar = Vector{0};
    s.psi_bar = Vector{0};
    s.phi_bar = Vector{0};
    return s;
}

// Metzler A is Hurwitz iff A v = -1 has a strictly positive solution.
bool hurwitz_by_witness(const Matrix& A) {
    try {
        const Vector v = solve(A, -1.0 * Vector::ones(A.rows()));
        return cmp_gt(v, Vector::zeros(v.size()), 1e-12);
    } catch (const Error&) {
        return false;
    }
}

SystemSpec random_system(std::mt19937_64& rng) {
    SystemSpec s;
    // coupling strength spread so that both outcomes occur often
    const double k = std::uniform_real_distribution<double>(0.1, 1.5)(rng);
    s.A = rng() % 2 ? testing::random_metzler_hurwitz(rng, 3) : testing::random_metzler(rng, 3);
    s.B = testing::random_nonneg(rng, 3, 2, k);
    s.C = testing::random_nonneg(rng, 2, 3, k);
    s.D = testing::random_nonneg(rng, 2, 2, 0.7);
    s.h_max = 1.0;
    s.omega_bar = Vector::zeros(3);
    s.d_bar = Vector::zeros(2);
    s.psi_bar = Vector::zeros(3);
    s.phi_bar = Vector::zeros(2);
    return s;
}

}  // namespace

TEST_CASE("is_metzler_hurwitz examples") {
    CHECK(is_metzler_hurwitz(Matrix{{-1}}));
    CHECK_FALSE(is_metzler_hurwitz(Matrix{{0}}));
    CHECK(is_metzler_hurwitz(demo_system().A));
    CHECK_FALSE(is_metzler_hurwitz(Matrix{{-1, 2}, {2, -1}}));
    CHECK_THROWS_AS(is_metzler_hurwitz(Matrix{{-1, -0.5}, {0, -1}}), Error);
    try {
        is_metzler_hurwitz(Matrix{{-1, -0.5}, {0, -1}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotMetzler);
    }
}

TEST_CASE("is_schur_nonneg examples") {
    CHECK(is_schur_nonneg(Matrix{{0.5}}));
    CHECK_FALSE(is_schur_nonneg(Matrix::identity(2)));
    CHECK(is_schur_nonneg(Matrix{{0.6, 0.3}, {0.1, 0.2}}));
    CHECK_FALSE(is_schur_nonneg(Matrix{{0.6, 0.5}, {0.5, 0.6}}));
    try {
        is_schur_nonneg(Matrix{{-0.5}});
        FAIL("expected NotNonnegative");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotNonnegative);
    }
}

TEST_CASE("check_joint_condition examples") {
    const StabilityReport demo = check_joint_condition(demo_system());
    CHECK(demo.all_hold());
    REQUIRE(demo.witness_p);
    CHECK(cmp_gt(*demo.witness_p, Vector::zeros(3)));

    const StabilityReport decoupled = check_joint_condition(scalar_system(-1, 0, 0, 0));
    CHECK(decoupled.joint_condition_holds);
    CHECK(decoupled.witness_p->operator[](0) == doctest::Approx(1.0));
    CHECK(decoupled.witness_q->operator[](0) == doctest::Approx(1.0));

    const StabilityReport unstable = check_joint_condition(scalar_system(1, 0, 0, 0));
    CHECK_FALSE(unstable.joint_condition_holds);
    CHECK_FALSE(unstable.witness_p);

    SystemSpec bad_d = demo_system();
    bad_d.D = Matrix::identity(2);
    const StabilityReport r = check_joint_condition(bad_d);
    CHECK_FALSE(r.d_is_schur);
    CHECK_FALSE(r.all_hold());
    bool mentioned = false;
    for (const auto& d : r.diagnostics) mentioned = mentioned || d == "D not Schur";
    CHECK(mentioned);
}

TEST_CASE("witness satisfies the strict inequalities") {
    const SystemSpec s = demo_system();
    const StabilityReport r = check_joint_condition(s);
    const Vector& p = *r.witness_p;
    const Vector& q = *r.witness_q;
    CHECK(cmp_gt(Vector::zeros(3), s.A * p + s.B * q));
    CHECK(cmp_gt(Vector::zeros(2), s.C * p + s.D * q - q));
}

TEST_CASE("alpha_max examples") {
    CHECK(alpha_max(Matrix{{-1}}, 0.001) == doctest::Approx(0.999).epsilon(1e-12));
    CHECK(alpha_max(Matrix{{-2, 0}, {0, -1}}, 0.001) == doctest::Approx(0.999).epsilon(1e-12));

    const Matrix A = demo_system().A;
    const double s = testing::largest_real_eigenvalue3(A);
    CHECK(s == doctest::Approx(-1.741873).epsilon(1e-6));
    const double expected = std::floor(-s / 0.001) * 0.001;
    CHECK(alpha_max(A, 0.001) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(alpha_max(A, 0.001) == doctest::Approx(1.741).epsilon(1e-12));

    try {
        alpha_max(Matrix{{1}}, 0.001);
        FAIL("expected NotStable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotStable);
    }
}

TEST_CASE("property: positive-witness test agrees with Hurwitz check on random Metzler matrices") {
    std::mt19937_64 rng(31);
    int stable = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix A = testing::random_metzler(rng, 3);
        const bool a = is_metzler_hurwitz(A);
        CHECK(a == hurwitz_by_witness(A));
        stable += a;
    }
    // both outcomes must be exercised
    CHECK(stable > 20);
    CHECK(stable < 180);
}

TEST_CASE("property: joint condition iff A Hurwitz and C(-A)^-1 B + D Schur") {
    std::mt19937_64 rng(32);
    int holds = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const SystemSpec s = random_system(rng);
        const bool joint = check_joint_condition(s).joint_condition_holds;
        bool reduced_schur = false;
        if (is_metzler_hurwitz(s.A)) {
            const Matrix reduced = s.C * (-1.0 * inverse(s.A)) * s.B + s.D;
            reduced_schur = is_schur_nonneg(reduced);
        }
        CHECK(joint == reduced_schur);
        holds += joint;
    }
    CHECK(holds > 20);
    CHECK(holds < 180);
}

TEST_CASE("property: alpha_max is the last stable grid point") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix A = testing::random_metzler_hurwitz(rng, 3);
        const double step = trial % 2 ? 1e-3 : 7e-3;
        const double a = alpha_max(A, step);
        auto shifted = [&](double alpha) { return A + alpha * Matrix::identity(3); };
        const auto k = static_cast<long long>(std::llround(a / step));
        for (long long j = 0; j <= k; j += std::max(1LL, k / 25)) CHECK(is_metzler_hurwitz(shifted(double(j) * step)));
        CHECK(is_metzler_hurwitz(shifted(double(k) * step)));
        CHECK_FALSE(is_metzler_hurwitz(shifted(double(k + 1) * step)));
        // agrees with the characteristic polynomial root
        const double s = testing::largest_real_eigenvalue3(A);
        CHECK(std::abs(a - (-s)) <= step + 1e-9);
    }
}
