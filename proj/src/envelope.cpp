#include "cdde/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cdde/error.hpp"
#include "cdde/model.hpp"
#include "cdde/stability.hpp"

namespace cdde {

namespace {

// M = -(A + alpha I)^{-1}; throws DecayRateTooLarge unless M >= 0.
Matrix decay_resolvent(const Matrix& A, double alpha) {
    Matrix shifted = A;
    for (std::size_t i = 0; i < A.rows(); ++i) shifted(i, i) += alpha;
    Matrix M;
    try {
        M = -1.0 * inverse(shifted);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        throw Error(ErrorCode::DecayRateTooLarge,
                    "A + alpha I is singular at alpha = " + std::to_string(alpha));
    }
    for (double v : M.values()) {
        if (v < -kNonnegTolerance) {
            throw Error(ErrorCode::DecayRateTooLarge,
                        "A + alpha I is not Hurwitz at alpha = " + std::to_string(alpha));
        }
    }
    return M;
}

double ratio_minimum(const Matrix& M, const Vector& a, std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t j = 0; j < M.rows(); ++j) {
        const double b = M(j, i);
        if (b > kIndexSetThreshold) {
            const double r = a[j] / b;
            if (!found || r < best) best = r;  // ties keep the smallest j
            found = true;
        }
    }
    if (!found) throw Error(ErrorCode::EmptyIndexSet, "column " + std::to_string(i) + " has no positive entry");
    return best;
}

void check_inputs(const Matrix& A, const Vector& theta_bar) {
    if (!A.square()) throw Error(ErrorCode::DimensionMismatch, "A must be square");
    if (!is_metzler(A)) throw Error(ErrorCode::NotMetzler, "A must be Metzler");
    if (theta_bar.size() != A.rows())
        throw Error(ErrorCode::DimensionMismatch, "theta_bar dimension does not match A");
    if (!is_nonnegative(theta_bar))
        throw Error(ErrorCode::InvalidArgument, "theta_bar must be nonnegative");
}

}  // namespace

double gamma_component(const Matrix& A, double alpha, const Vector& theta_bar, std::size_t i) {
    check_inputs(A, theta_bar);
    if (i >= A.rows()) throw Error(ErrorCode::InvalidArgument, "component index out of range");
    const Matrix M = decay_resolvent(A, alpha);
    return ratio_minimum(M, M * theta_bar, i);
}

ExponentialEstimate exponential_estimate(const Matrix& A, double alpha, const Vector& theta_bar) {
    check_inputs(A, theta_bar);
    const Matrix M = decay_resolvent(A, alpha);
    const Vector a = M * theta_bar;
    ExponentialEstimate est{alpha, Vector(A.rows())};
    for (std::size_t i = 0; i < A.rows(); ++i) est.gamma[i] = ratio_minimum(M, a, i);
    return est;
}

double time_to_threshold(double gamma_i, double delta_i, double alpha) {
    if (!(delta_i > 0.0)) throw Error(ErrorCode::NonpositiveThreshold, "delta must be positive");
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    if (gamma_i <= delta_i) return 0.0;
    return -std::log(delta_i / gamma_i) / alpha;
}

ConvergenceResult finite_time(const Matrix& A, const Vector& theta_bar, const Vector& delta,
                              double alpha_step) {
    check_inputs(A, theta_bar);
    if (delta.size() != A.rows())
        throw Error(ErrorCode::DimensionMismatch, "delta dimension does not match A");
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(delta[i] > 0.0)) {
            throw Error(ErrorCode::NonpositiveThreshold,
                        "delta[" + std::to_string(i) + "] = " + std::to_string(delta[i]));
        }
    }
    if (!(alpha_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha step must be positive");

    // Refine the grid until it has at least one admissible point.
    double step = alpha_step;
    double top = alpha_max(A, step);
    while (top < step) {
        step *= 0.5;
        top = alpha_max(A, step);
    }
    const auto count = static_cast<std::size_t>(std::llround(top / step));

    const std::size_t n = A.rows();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best_t(n, inf), best_alpha(n, 0.0);
    for (std::size_t k = 1; k <= count; ++k) {
        const double alpha = static_cast<double>(k) * step;
        const Matrix M = decay_resolvent(A, alpha);
        const Vector a = M * theta_bar;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = time_to_threshold(ratio_minimum(M, a, i), delta[i], alpha);
            if (t < best_t[i]) {
                best_t[i] = t;
                best_alpha[i] = alpha;
            }
        }
    }

    ConvergenceResult result{0.0, Vector(std::move(best_t)), Vector(std::move(best_alpha))};
    for (double t : result.per_component_T) result.T = std::max(result.T, t);
    return result;
}

}  // namespace cdde
