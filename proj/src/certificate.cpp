#include "cdde/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cdde/error.hpp"
#include "cdde/stability.hpp"

namespace cdde {

namespace {

Vector head(const Vector& v, std::size_t n) {
    return Vector(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)));
}

Vector tail(const Vector& v, std::size_t n) {
    return Vector(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end()));
}

Vector concat(const Vector& a, const Vector& b) {
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return Vector(std::move(out));
}

// Runs one pipeline stage, tagging any library error with its step number.
template <typename F>
auto at_step(int step, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.pipeline_step() != 0) throw;
        throw Error(e.code(), e.what(), step);
    }
}

// -A^{-1} B q
Vector delayed_input_offset(const SystemSpec& spec, const Vector& q) {
    return -solve(spec.A, spec.B * q);
}

}  // namespace

UltimateBound ultimate_bound(const SystemSpec& spec) {
    require_valid_structure(spec);
    const Vector rhs = concat(spec.omega_bar, spec.d_bar);
    const Vector sol = -solve(coupling_matrix(spec), rhs);
    UltimateBound ub{head(sol, spec.n()), tail(sol, spec.n())};
    // Nonnegative by construction; clear round-off below zero.
    for (double& v : ub.eta) v = std::max(v, 0.0);
    for (double& v : ub.varsigma) v = std::max(v, 0.0);
    return ub;
}

ComparisonVectors comparison_vectors(const SystemSpec& spec, const Vector& xi,
                                     const Vector& init_x_bound, const Vector& init_y_bound) {
    require_valid_structure(spec);
    const std::size_t n = spec.n();
    const std::size_t m = spec.m();
    if (xi.size() != n + m) throw Error(ErrorCode::DimensionMismatch, "xi must have dimension n + m");
    if (init_x_bound.size() != n || init_y_bound.size() != m)
        throw Error(ErrorCode::DimensionMismatch, "initial bounds have wrong dimension");
    if (!cmp_gt(xi, Vector::zeros(n + m))) throw Error(ErrorCode::InvalidArgument, "xi must be positive");
    if (!is_nonnegative(init_x_bound) || !is_nonnegative(init_y_bound))
        throw Error(ErrorCode::InvalidArgument, "initial bounds must be nonnegative");

    const Vector unit = -solve(coupling_matrix(spec), xi);
    if (!cmp_gt(unit, Vector::zeros(n + m), kStrictPositivity)) {
        throw Error(ErrorCode::HypothesisViolated,
                    "coupling system has no strictly positive solution for this xi");
    }
    const Vector p_unit = head(unit, n);
    const Vector q_unit = tail(unit, n);

    double scale = kMinScale;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, init_x_bound[i] / p_unit[i]);
    for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, init_y_bound[j] / q_unit[j]);

    return {scale * p_unit, scale * q_unit, scale};
}

ContractionFactor contraction_factor(const SystemSpec& spec, const Vector& p, const Vector& q) {
    require_valid_structure(spec);
    if (p.size() != spec.n() || q.size() != spec.m())
        throw Error(ErrorCode::DimensionMismatch, "p or q has wrong dimension");
    if (!cmp_gt(p, Vector::zeros(p.size())) || !cmp_gt(q, Vector::zeros(q.size())))
        throw Error(ErrorCode::InvalidArgument, "p and q must be strictly positive");

    const Vector m1 = delayed_input_offset(spec, q);
    const Vector m2 = solve(Matrix::identity(spec.m()) - spec.D, spec.C * p);
    const Vector m3 = spec.C * p + spec.D * q;

    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, m1[i] / p[i]);
    for (std::size_t j = 0; j < q.size(); ++j) {
        worst = std::max(worst, m2[j] / q[j]);
        worst = std::max(worst, m3[j] / q[j]);
    }
    ContractionFactor mu;
    mu.raw = 1.0 - worst;
    if (!(mu.raw > 0.0)) {
        throw Error(ErrorCode::HypothesisViolated,
                    "contraction inequalities fail for (p, q): raw mu = " + std::to_string(mu.raw));
    }
    mu.value = std::clamp(kMuSafety * mu.raw, kMuMin, kMuMax);
    return mu;
}

BoundCertificate compute_certificate(const SystemSpec& spec, const CertificateOptions& options) {
    const std::size_t n = spec.n();
    const std::size_t m = spec.m();

    at_step(1, [&] {
        require_valid_structure(spec);
        const StabilityReport report = check_joint_condition(spec, options.xi);
        if (!report.all_hold()) {
            std::string why;
            for (const auto& d : report.diagnostics) why += (why.empty() ? "" : "; ") + d;
            throw Error(ErrorCode::HypothesisViolated, why);
        }
        return 0;
    });

    BoundCertificate cert;
    cert.alpha_step = options.alpha_step;

    // Step 2: ultimate bound and the constant-bound shortcut.
    const UltimateBound ub = at_step(2, [&] { return ultimate_bound(spec); });
    cert.eta = ub.eta;
    cert.varsigma = ub.varsigma;
    cert.constant_bound = cmp_leq(spec.psi_bar, ub.eta) && cmp_leq(spec.phi_bar, ub.varsigma);

    // Step 3: comparison vectors for the initial data shifted by the ultimate bound.
    const Vector init_x = cwise_max(spec.psi_bar, ub.eta) - ub.eta;
    const Vector init_y = cwise_max(spec.phi_bar, ub.varsigma) - ub.varsigma;
    const Vector xi = options.xi.value_or(Vector::ones(n + m));
    const ComparisonVectors pq =
        at_step(3, [&] { return comparison_vectors(spec, xi, init_x, init_y); });
    cert.p = pq.p;
    cert.q = pq.q;

    // Step 4: contraction factor.
    const ContractionFactor mu = at_step(4, [&] { return contraction_factor(spec, cert.p, cert.q); });
    cert.mu = mu.value;
    cert.mu_raw = mu.raw;

    // Steps 5-6: decay-rate sweep and finite-time convergence of u' = A u.
    const Vector offset = at_step(6, [&] { return delayed_input_offset(spec, cert.q); });
    const Vector theta_bar = cert.p - offset;
    const Vector delta = (1.0 - cert.mu) * cert.p - offset;
    cert.convergence = at_step(6, [&] {
        try {
            return finite_time(spec.A, theta_bar, delta, options.alpha_step);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NotStable) throw Error(e.code(), e.what(), 5);
            throw;
        }
    });
    cert.T_star = std::max(cert.convergence.T, spec.h_max);
    if (!(cert.T_star > 0.0)) {
        throw Error(ErrorCode::HypothesisViolated, "dwell time is zero", 6);
    }
    return cert;
}

StateBound staircase(const BoundCertificate& cert, double t) {
    if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "staircase evaluated at t < 0");
    if (cert.constant_bound) return {cert.eta, cert.varsigma};
    const double k = std::floor(t / cert.T_star);
    const double factor = std::pow(1.0 - cert.mu, k);
    return {cert.eta + factor * cert.p, cert.varsigma + (factor * (1.0 - cert.mu)) * cert.q};
}

StateBound smooth_envelope(const BoundCertificate& cert, double t) {
    if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "envelope evaluated at t < 0");
    if (cert.constant_bound) return {cert.eta, cert.varsigma};
    const double s = t / cert.T_star;
    return {cert.eta + std::pow(1.0 - cert.mu, s - 1.0) * cert.p,
            cert.varsigma + std::pow(1.0 - cert.mu, s) * cert.q};
}

}  // namespace cdde
