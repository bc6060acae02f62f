#include "cdde/model.hpp"

#include <cmath>
#include <sstream>

#include "cdde/error.hpp"

namespace cdde {

namespace {

std::string shape(const Matrix& M) {
    return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

void check_shape(std::vector<std::string>& out, const char* name, const Matrix& M,
                 std::size_t rows, std::size_t cols) {
    if (M.rows() != rows || M.cols() != cols) {
        out.push_back(std::string(name) + " has shape " + shape(M) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void check_dim(std::vector<std::string>& out, const char* name, const Vector& v, std::size_t dim) {
    if (v.size() != dim) {
        out.push_back(std::string(name) + " has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(dim));
    }
}

void check_matrix_signs(std::vector<std::string>& out, const char* name, const Matrix& M,
                        bool skip_diagonal) {
    if (!M.all_finite()) {
        out.push_back(std::string(name) + " has non-finite entries");
        return;
    }
    for (std::size_t r = 0; r < M.rows(); ++r) {
        for (std::size_t c = 0; c < M.cols(); ++c) {
            if (skip_diagonal && r == c) continue;
            if (M(r, c) < -kNonnegTolerance) {
                out.push_back(std::string(name) +
                              (skip_diagonal ? " not Metzler at (" : " not nonnegative at (") +
                              std::to_string(r) + ", " + std::to_string(c) + ")");
            }
        }
    }
}

void check_vector_signs(std::vector<std::string>& out, const char* name, const Vector& v) {
    if (!v.all_finite()) {
        out.push_back(std::string(name) + " has non-finite entries");
    } else if (!is_nonnegative(v)) {
        out.push_back(std::string(name) + " not nonnegative");
    }
}

void clamp_matrix(Matrix& M, bool skip_diagonal) {
    for (std::size_t r = 0; r < M.rows(); ++r)
        for (std::size_t c = 0; c < M.cols(); ++c) {
            if (skip_diagonal && r == c) continue;
            double& v = M(r, c);
            if (v < 0.0 && v > -kNonnegTolerance) v = 0.0;
        }
}

void clamp_vector(Vector& v) {
    for (double& x : v)
        if (x < 0.0 && x > -kNonnegTolerance) x = 0.0;
}

}  // namespace

bool is_nonnegative(const Matrix& M, double tol) noexcept {
    for (double v : M.values())
        if (!(v >= -tol)) return false;
    return true;
}

bool is_nonnegative(const Vector& v, double tol) noexcept {
    for (double x : v)
        if (!(x >= -tol)) return false;
    return true;
}

bool is_metzler(const Matrix& M, double tol) noexcept {
    if (!M.square()) return false;
    for (std::size_t r = 0; r < M.rows(); ++r)
        for (std::size_t c = 0; c < M.cols(); ++c)
            if (r != c && !(M(r, c) >= -tol)) return false;
    return true;
}

ValidationReport validate_structure(const SystemSpec& spec) noexcept {
    ValidationReport report;
    auto& out = report.findings;
    try {
        const std::size_t n = spec.A.rows();
        const std::size_t m = spec.D.rows();
        if (n == 0) out.emplace_back("A is empty");
        check_shape(out, "A", spec.A, n, n);
        check_shape(out, "B", spec.B, n, m);
        check_shape(out, "C", spec.C, m, n);
        check_shape(out, "D", spec.D, m, m);
        check_dim(out, "omega_bar", spec.omega_bar, n);
        check_dim(out, "d_bar", spec.d_bar, m);
        check_dim(out, "psi_bar", spec.psi_bar, n);
        check_dim(out, "phi_bar", spec.phi_bar, m);

        check_matrix_signs(out, "A", spec.A, true);
        check_matrix_signs(out, "B", spec.B, false);
        check_matrix_signs(out, "C", spec.C, false);
        check_matrix_signs(out, "D", spec.D, false);
        check_vector_signs(out, "omega_bar", spec.omega_bar);
        check_vector_signs(out, "d_bar", spec.d_bar);
        check_vector_signs(out, "psi_bar", spec.psi_bar);
        check_vector_signs(out, "phi_bar", spec.phi_bar);

        if (!std::isfinite(spec.h_max) || spec.h_max < 0.0) {
            out.emplace_back("h_max must be a finite nonnegative number");
        }
    } catch (...) {
        out.emplace_back("internal error while validating");
    }
    return report;
}

void require_valid_structure(const SystemSpec& spec) {
    const auto report = validate_structure(spec);
    if (report.ok()) return;
    std::ostringstream msg;
    for (std::size_t i = 0; i < report.findings.size(); ++i) {
        if (i) msg << "; ";
        msg << report.findings[i];
    }
    throw Error(ErrorCode::InvalidArgument, msg.str());
}

SystemSpec clamp_roundoff(SystemSpec spec) {
    clamp_matrix(spec.A, true);
    clamp_matrix(spec.B, false);
    clamp_matrix(spec.C, false);
    clamp_matrix(spec.D, false);
    clamp_vector(spec.omega_bar);
    clamp_vector(spec.d_bar);
    clamp_vector(spec.psi_bar);
    clamp_vector(spec.phi_bar);
    return spec;
}

SystemSpec demo_system() {
    SystemSpec s;
    s.A = Matrix{{-2.5, 0.3, 0.0}, {0.5, -2.0, 0.1}, {0.4, 0.6, -3.0}};
    s.B = Matrix{{0.2, 0.1}, {0.5, 0.3}, {0.0, 0.4}};
    s.C = Matrix{{0.3, 0.4, 0.1}, {0.2, 0.2, 0.0}};
    s.D = Matrix{{0.6, 0.3}, {0.1, 0.2}};
    s.h_max = 2.0;
    s.omega_bar = Vector{0.5, 0.3, 0.1};
    s.d_bar = Vector{0.3, 0.1};
    s.psi_bar = Vector{2.0, 5.0, 3.0};
    s.phi_bar = Vector{15.0, 5.0};
    return s;
}

}  // namespace cdde
