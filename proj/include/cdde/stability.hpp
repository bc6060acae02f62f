#pragma once

// Stability tests for positive systems, decided through sign patterns of
// inverses rather than eigenvalues:
//   Metzler M is Hurwitz      <=>  M^{-1} <= 0
//   nonnegative M is Schur    <=>  (I - M)^{-1} >= 0

#include <optional>
#include <string>
#include <vector>

#include "cdde/linalg.hpp"
#include "cdde/model.hpp"

namespace cdde {

// Witness entries must exceed this to count as strictly positive.
inline constexpr double kStrictPositivity = 1e-12;

struct StabilityReport {
    bool a_is_metzler = false;
    bool bcd_nonnegative = false;
    bool d_is_schur = false;
    // [A B; C D-I] [p; q] = -xi has a strictly positive solution.
    bool joint_condition_holds = false;
    std::optional<Vector> witness_p;
    std::optional<Vector> witness_q;
    std::vector<std::string> diagnostics;

    bool all_hold() const noexcept {
        return a_is_metzler && bcd_nonnegative && d_is_schur && joint_condition_holds;
    }
};

// Throws NotMetzler when A is not Metzler (within tolerance).
bool is_metzler_hurwitz(const Matrix& A);

// Throws NotNonnegative when D has an entry below -tolerance.
bool is_schur_nonneg(const Matrix& D);

// The coupling matrix [A B; C D - I].
Matrix coupling_matrix(const SystemSpec& spec);

// xi defaults to all ones.
StabilityReport check_joint_condition(const SystemSpec& spec,
                                      const std::optional<Vector>& xi = std::nullopt);

// Largest grid point k*step with A + k*step*I Metzler-Hurwitz. Throws
// NotStable when A itself fails the test.
double alpha_max(const Matrix& A, double step);

}  // namespace cdde
