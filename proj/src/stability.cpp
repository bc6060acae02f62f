#include "cdde/stability.hpp"

#include <cstdint>

#include "cdde/error.hpp"

namespace cdde {

namespace {

Matrix shifted(const Matrix& A, double alpha) {
    Matrix out = A;
    for (std::size_t i = 0; i < A.rows(); ++i) out(i, i) += alpha;
    return out;
}

}  // namespace

bool is_metzler_hurwitz(const Matrix& A) {
    if (!A.square()) throw Error(ErrorCode::DimensionMismatch, "Hurwitz test needs a square matrix");
    if (!is_metzler(A)) throw Error(ErrorCode::NotMetzler, "matrix has a negative off-diagonal entry");
    try {
        const Matrix inv = inverse(A);
        for (double v : inv.values())
            if (v > kNonnegTolerance) return false;
        return true;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularMatrix) return false;
        throw;
    }
}

bool is_schur_nonneg(const Matrix& D) {
    if (!D.square()) throw Error(ErrorCode::DimensionMismatch, "Schur test needs a square matrix");
    if (!is_nonnegative(D)) throw Error(ErrorCode::NotNonnegative, "matrix has a negative entry");
    try {
        const Matrix inv = inverse(Matrix::identity(D.rows()) - D);
        for (double v : inv.values())
            if (v < -kNonnegTolerance) return false;
        return true;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularMatrix) return false;
        throw;
    }
}

Matrix coupling_matrix(const SystemSpec& spec) {
    return Matrix::block(spec.A, spec.B, spec.C, spec.D - Matrix::identity(spec.m()));
}

StabilityReport check_joint_condition(const SystemSpec& spec, const std::optional<Vector>& xi) {
    require_valid_structure(spec);
    StabilityReport report;
    const std::size_t n = spec.n();
    const std::size_t m = spec.m();

    report.a_is_metzler = is_metzler(spec.A);
    if (!report.a_is_metzler) report.diagnostics.emplace_back("A not Metzler");
    report.bcd_nonnegative =
        is_nonnegative(spec.B) && is_nonnegative(spec.C) && is_nonnegative(spec.D);
    if (!report.bcd_nonnegative) report.diagnostics.emplace_back("B, C, D not all nonnegative");

    if (is_nonnegative(spec.D)) {
        report.d_is_schur = is_schur_nonneg(spec.D);
        if (!report.d_is_schur) report.diagnostics.emplace_back("D not Schur");
    }

    const Vector weights = xi.value_or(Vector::ones(n + m));
    if (weights.size() != n + m) {
        throw Error(ErrorCode::DimensionMismatch,
                    "xi must have dimension n + m = " + std::to_string(n + m));
    }
    if (!cmp_gt(weights, Vector::zeros(n + m))) {
        throw Error(ErrorCode::InvalidArgument, "xi must be strictly positive");
    }

    try {
        const Vector pq = -solve(coupling_matrix(spec), weights);
        Vector p(n), q(m);
        for (std::size_t i = 0; i < n; ++i) p[i] = pq[i];
        for (std::size_t j = 0; j < m; ++j) q[j] = pq[n + j];
        report.joint_condition_holds =
            cmp_gt(pq, Vector::zeros(n + m), kStrictPositivity);
        if (report.joint_condition_holds) {
            report.witness_p = std::move(p);
            report.witness_q = std::move(q);
        } else {
            report.diagnostics.emplace_back(
                "s(A + B(I - D)^-1 C) < 0 fails: witness [p; q] is not strictly positive");
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        report.joint_condition_holds = false;
        report.diagnostics.emplace_back(std::string("coupling matrix singular: ") + e.what());
    }
    return report;
}

double alpha_max(const Matrix& A, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha step must be positive");
    if (!is_metzler_hurwitz(A)) throw Error(ErrorCode::NotStable, "A is not Hurwitz");

    // s(A + alpha I) = s(A) + alpha is increasing, so the Hurwitz test is
    // monotone on the grid; gallop then bisect on the integer index.
    auto stable = [&](std::int64_t k) {
        return is_metzler_hurwitz(shifted(A, static_cast<double>(k) * step));
    };
    std::int64_t good = 0;
    std::int64_t bad = 1;
    while (stable(bad)) {
        good = bad;
        bad *= 2;
        if (bad > (std::int64_t{1} << 52)) {
            throw Error(ErrorCode::InvalidArgument, "alpha search did not terminate");
        }
    }
    while (bad - good > 1) {
        const std::int64_t mid = good + (bad - good) / 2;
        if (stable(mid)) good = mid;
        else bad = mid;
    }
    return static_cast<double>(good) * step;
}

}  // namespace cdde
