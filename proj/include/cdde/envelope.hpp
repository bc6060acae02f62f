#pragma once

// Componentwise exponential envelopes for u' = A u with A Metzler and
// Hurwitz, and the finite time after which every solution started in
// [0, theta_bar] stays inside [0, delta].
//
// For a decay rate alpha with A + alpha I Hurwitz, every v > 0 with
// v^T (A + alpha I) < 0 gives u_i(t) <= (v^T theta_bar / v_i) e^{-alpha t}.
// Such v are exactly v = M^T r with M = -(A + alpha I)^{-1} >= 0 and r > 0, so
// the factor becomes the ratio (a . r) / (b . r) with a = M theta_bar and
// b = M e_i. Its infimum over r > 0 is min_{j : b_j > 0} a_j / b_j.

#include <cstddef>

#include "cdde/linalg.hpp"

namespace cdde {

inline constexpr double kDefaultAlphaStep = 1e-3;
// b_j above this belongs to the index set of the ratio minimum.
inline constexpr double kIndexSetThreshold = 1e-12;

struct ExponentialEstimate {
    double alpha = 0.0;
    Vector gamma;  // u_i(t) <= gamma_i e^{-alpha t}
};

struct ConvergenceResult {
    double T = 0.0;
    Vector per_component_T;
    Vector per_component_alpha;
};

// Optimized factor for one component. Throws DecayRateTooLarge when
// A + alpha I is not Hurwitz.
double gamma_component(const Matrix& A, double alpha, const Vector& theta_bar, std::size_t i);

// All components at once (one inverse shared across them).
ExponentialEstimate exponential_estimate(const Matrix& A, double alpha, const Vector& theta_bar);

// Smallest t >= 0 with gamma e^{-alpha t} <= delta.
double time_to_threshold(double gamma_i, double delta_i, double alpha);

// Sweeps alpha over the grid (0, alpha_max] and keeps, per component, the
// earliest crossing time; T is the max over components.
ConvergenceResult finite_time(const Matrix& A, const Vector& theta_bar, const Vector& delta,
                              double alpha_step = kDefaultAlphaStep);

}  // namespace cdde
