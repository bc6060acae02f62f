#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cdde/linalg.hpp"

namespace cdde {

// Entries in (-kNonnegTolerance, 0) count as zero.
inline constexpr double kNonnegTolerance = 1e-12;

// Coupled differential-difference system with bounded data:
//
//   x'(t) = A x(t) + B y(t - h1(t)) + w(t)
//   y(t)  = C x(t) + D y(t - h2(t)) + d(t)
//
// with 0 <= w <= omega_bar, 0 <= d <= d_bar, 0 <= h1, h2 <= h_max,
// 0 <= x(0) <= psi_bar and 0 <= y(s) <= phi_bar on [-h_max, 0).
// The initial time is always 0.
struct SystemSpec {
    Matrix A;  // n x n, Metzler
    Matrix B;  // n x m, nonnegative
    Matrix C;  // m x n, nonnegative
    Matrix D;  // m x m, nonnegative
    double h_max = 0.0;
    Vector omega_bar;
    Vector d_bar;
    Vector psi_bar;
    Vector phi_bar;

    std::size_t n() const noexcept { return A.rows(); }
    std::size_t m() const noexcept { return D.rows(); }
};

struct ValidationReport {
    std::vector<std::string> findings;

    bool ok() const noexcept { return findings.empty(); }
};

// Structural checks only (dimensions, signs, finiteness). Never throws.
ValidationReport validate_structure(const SystemSpec& spec) noexcept;

// Throws InvalidArgument listing every finding when the spec is not valid.
void require_valid_structure(const SystemSpec& spec);

// Snaps round-off negatives in (-kNonnegTolerance, 0) to 0 in B, C, D, the
// off-diagonal of A and the bound vectors.
SystemSpec clamp_roundoff(SystemSpec spec);

bool is_nonnegative(const Matrix& M, double tol = kNonnegTolerance) noexcept;
bool is_nonnegative(const Vector& v, double tol = kNonnegTolerance) noexcept;
bool is_metzler(const Matrix& M, double tol = kNonnegTolerance) noexcept;

// The three-state, two-output benchmark system used throughout the docs and
// tests (bounds h_max = 2, psi_bar = [2 5 3], phi_bar = [15 5]).
SystemSpec demo_system();

}  // namespace cdde
