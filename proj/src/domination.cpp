#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "cdde/error.hpp"
#include "cdde/simulator.hpp"

namespace cdde {

DominationReport verify_domination(const Trajectory& traj, const BoundCertificate& cert,
                                   double slack) {
    const double lowest = -std::numeric_limits<double>::infinity();
    DominationReport report;
    report.slack = slack;
    report.x_margin = Vector(cert.eta.size(), 0.0);
    report.y_margin = Vector(cert.varsigma.size(), 0.0);
    for (double& v : report.x_margin) v = lowest;
    for (double& v : report.y_margin) v = lowest;

    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const StateBound bound = staircase(cert, t);
        const Vector& x = traj.x[k];
        const Vector& y = traj.y[k];
        if (x.size() != bound.x.size() || y.size() != bound.y.size()) {
            throw Error(ErrorCode::DimensionMismatch, "trajectory and certificate dimensions differ");
        }
        bool bad = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double gap = x[i] - bound.x[i];
            report.x_margin[i] = std::max(report.x_margin[i], gap);
            bad = bad || gap > slack;
        }
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double gap = y[j] - bound.y[j];
            report.y_margin[j] = std::max(report.y_margin[j], gap);
            bad = bad || gap > slack;
        }
        if (bad && !report.first_violation) report.first_violation = t;
    }
    return report;
}

namespace {

bool same_setup(const SimulationScenario& a, const SimulationScenario& b) {
    const SystemSpec& s = a.spec;
    const SystemSpec& t = b.spec;
    return s.A == t.A && s.B == t.B && s.C == t.C && s.D == t.D && s.h_max == t.h_max &&
           s.omega_bar == t.omega_bar && s.d_bar == t.d_bar && s.psi_bar == t.psi_bar &&
           s.phi_bar == t.phi_bar && a.omega == b.omega && a.d == b.d && a.h1 == b.h1 &&
           a.h2 == b.h2 && a.t_end == b.t_end && a.step == b.step;
}

}  // namespace

bool comparison_check(const SimulationScenario& lo, const SimulationScenario& hi) {
    if (!same_setup(lo, hi)) {
        throw Error(ErrorCode::MismatchedScenarios,
                    "scenarios must share system, disturbances, delays and grid");
    }
    if (lo.psi.size() != hi.psi.size() || !cmp_leq(lo.psi, hi.psi)) {
        throw Error(ErrorCode::MismatchedScenarios, "psi_lo must be <= psi_hi");
    }
    if (lo.phi.dim() != hi.phi.dim()) {
        throw Error(ErrorCode::MismatchedScenarios, "phi signals have different dimensions");
    }
    const double h_max = lo.spec.h_max;
    const auto count = static_cast<long long>(std::floor(h_max / lo.step + 1e-9));
    for (long long k = 0; k <= count; ++k) {
        const double s = -h_max + static_cast<double>(k) * lo.step;
        if (s >= 0.0) break;
        if (!cmp_leq(lo.phi(s), hi.phi(s))) {
            throw Error(ErrorCode::MismatchedScenarios,
                        "phi_lo must be <= phi_hi on the history interval");
        }
    }
    if (!cmp_leq(lo.phi(0.0), hi.phi(0.0))) {
        throw Error(ErrorCode::MismatchedScenarios, "phi_lo must be <= phi_hi at 0");
    }

    const Trajectory a = simulate(lo);
    const Trajectory b = simulate(hi);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!cmp_leq(a.x[k], b.x[k], kComparisonSlack)) return false;
        if (!cmp_leq(a.y[k], b.y[k], kComparisonSlack)) return false;
    }
    return true;
}

namespace {

void put(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out << buf;
}

void put_all(std::ostream& out, const Vector& v) {
    for (double x : v) {
        out << ',';
        put(out, x);
    }
}

void header(std::ostream& out, const char* prefix, std::size_t count) {
    for (std::size_t i = 1; i <= count; ++i) out << ',' << prefix << '_' << i;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const BoundCertificate* cert) {
    const std::size_t n = traj.x.empty() ? 0 : traj.x.front().size();
    const std::size_t m = traj.y.empty() ? 0 : traj.y.front().size();
    out << 't';
    header(out, "x", n);
    header(out, "y", m);
    if (cert) {
        header(out, "xb", n);
        header(out, "yb", m);
    }
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        put(out, traj.times[k]);
        put_all(out, traj.x[k]);
        put_all(out, traj.y[k]);
        if (cert) {
            const StateBound b = staircase(*cert, traj.times[k]);
            put_all(out, b.x);
            put_all(out, b.y);
        }
        out << '\n';
    }
}

void write_staircase_csv(std::ostream& out, const BoundCertificate& cert, double t_end,
                         double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
    out << 't';
    header(out, "xb", cert.eta.size());
    header(out, "yb", cert.varsigma.size());
    out << '\n';
    const auto count = static_cast<std::size_t>(std::floor(t_end / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        const double t = static_cast<double>(k) * step;
        const StateBound b = staircase(cert, t);
        put(out, t);
        put_all(out, b.x);
        put_all(out, b.y);
        out << '\n';
    }
}

}  // namespace cdde
