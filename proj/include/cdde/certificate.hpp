#pragma once

#include <optional>

#include "cdde/envelope.hpp"
#include "cdde/linalg.hpp"
#include "cdde/model.hpp"

namespace cdde {

// mu is shrunk by this factor so the contraction inequalities stay strict.
inline constexpr double kMuSafety = 0.999;
inline constexpr double kMuMax = 0.999;
inline constexpr double kMuMin = 1e-9;
// Lower clamp on the scaling of the comparison vectors.
inline constexpr double kMinScale = 1e-9;

struct UltimateBound {
    Vector eta;       // x part
    Vector varsigma;  // y part
};

struct ComparisonVectors {
    Vector p;
    Vector q;
    double scale = 0.0;  // factor applied to the unit-weight solution
};

struct ContractionFactor {
    double raw = 0.0;   // 1 - max of the three ratio families
    double value = 0.0; // raw * kMuSafety, clamped to [kMuMin, kMuMax]
};

// Geometric staircase bound
//   x(t) <= eta + (1 - mu)^k p,  y(t) <= varsigma + (1 - mu)^(k+1) q
// on t in [k T*, (k+1) T*).
struct BoundCertificate {
    Vector eta;
    Vector varsigma;
    Vector p;
    Vector q;
    double mu = 0.0;
    double mu_raw = 0.0;
    double T_star = 0.0;
    ConvergenceResult convergence;
    bool constant_bound = false;
    double alpha_step = kDefaultAlphaStep;
};

struct CertificateOptions {
    double alpha_step = kDefaultAlphaStep;
    std::optional<Vector> xi;  // defaults to all ones
};

struct StateBound {
    Vector x;
    Vector y;
};

// [eta; varsigma] = -[A B; C D-I]^{-1} [omega_bar; d_bar]
UltimateBound ultimate_bound(const SystemSpec& spec);

// Scales the solution of [A B; C D-I][p; q] = -xi so that p >= init_x_bound
// and q >= init_y_bound.
ComparisonVectors comparison_vectors(const SystemSpec& spec, const Vector& xi,
                                     const Vector& init_x_bound, const Vector& init_y_bound);

// Throws HypothesisViolated when the raw factor is not positive.
ContractionFactor contraction_factor(const SystemSpec& spec, const Vector& p, const Vector& q);

BoundCertificate compute_certificate(const SystemSpec& spec, const CertificateOptions& options = {});

// Throws NegativeTime for t < 0.
StateBound staircase(const BoundCertificate& cert, double t);

// Continuous majorant of the staircase,
//   eta + (1 - mu)^(t/T* - 1) p,  varsigma + (1 - mu)^(t/T*) q.
// Only the staircase itself is the certified bound.
StateBound smooth_envelope(const BoundCertificate& cert, double t);

}  // namespace cdde
