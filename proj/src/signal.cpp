#include <cmath>
#include <string>

#include "cdde/error.hpp"
#include "cdde/simulator.hpp"

namespace cdde {

namespace {

struct KindName {
    SignalKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {SignalKind::Zero, "zero"},
    {SignalKind::Constant, "constant"},
    {SignalKind::AbsSin, "abs_sin"},
    {SignalKind::AbsCos, "abs_cos"},
    {SignalKind::ConstPlusAbsSin, "const_plus_abs_sin"},
    {SignalKind::ConstPlusAbsCos, "const_plus_abs_cos"},
};

}  // namespace

std::string_view to_string(SignalKind kind) noexcept {
    for (const auto& kn : kKindNames)
        if (kn.kind == kind) return kn.name;
    return "unknown";
}

std::optional<SignalKind> parse_signal_kind(std::string_view name) noexcept {
    for (const auto& kn : kKindNames)
        if (kn.name == name) return kn.kind;
    return std::nullopt;
}

SignalSpec::SignalSpec(SignalKind kind, Vector amplitude, Vector frequency, Vector offset)
    : kind_(kind),
      amplitude_(std::move(amplitude)),
      frequency_(std::move(frequency)),
      offset_(std::move(offset)) {
    const std::size_t dim = amplitude_.size();
    if (frequency_.empty()) frequency_ = Vector::zeros(dim);
    if (offset_.empty()) offset_ = Vector::zeros(dim);
    if (frequency_.size() != dim || offset_.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "signal amplitude, frequency and offset must share a dimension");
    }
}

SignalSpec SignalSpec::zero(std::size_t dim) {
    return {SignalKind::Zero, Vector::zeros(dim), {}, {}};
}

SignalSpec SignalSpec::constant(Vector value) {
    return {SignalKind::Constant, std::move(value), {}, {}};
}

SignalSpec SignalSpec::abs_sin(Vector amplitude, Vector frequency) {
    return {SignalKind::AbsSin, std::move(amplitude), std::move(frequency), {}};
}

SignalSpec SignalSpec::abs_cos(Vector amplitude, Vector frequency) {
    return {SignalKind::AbsCos, std::move(amplitude), std::move(frequency), {}};
}

SignalSpec SignalSpec::const_plus_abs_sin(Vector offset, Vector amplitude, Vector frequency) {
    return {SignalKind::ConstPlusAbsSin, std::move(amplitude), std::move(frequency), std::move(offset)};
}

SignalSpec SignalSpec::const_plus_abs_cos(Vector offset, Vector amplitude, Vector frequency) {
    return {SignalKind::ConstPlusAbsCos, std::move(amplitude), std::move(frequency), std::move(offset)};
}

void SignalSpec::evaluate(double t, std::span<double> out) const noexcept {
    const std::size_t dim = amplitude_.size();
    switch (kind_) {
        case SignalKind::Zero:
            for (std::size_t j = 0; j < dim; ++j) out[j] = 0.0;
            break;
        case SignalKind::Constant:
            for (std::size_t j = 0; j < dim; ++j) out[j] = amplitude_[j];
            break;
        case SignalKind::AbsSin:
            for (std::size_t j = 0; j < dim; ++j)
                out[j] = amplitude_[j] * std::abs(std::sin(frequency_[j] * t));
            break;
        case SignalKind::AbsCos:
            for (std::size_t j = 0; j < dim; ++j)
                out[j] = amplitude_[j] * std::abs(std::cos(frequency_[j] * t));
            break;
        case SignalKind::ConstPlusAbsSin:
            for (std::size_t j = 0; j < dim; ++j)
                out[j] = offset_[j] + amplitude_[j] * std::abs(std::sin(frequency_[j] * t));
            break;
        case SignalKind::ConstPlusAbsCos:
            for (std::size_t j = 0; j < dim; ++j)
                out[j] = offset_[j] + amplitude_[j] * std::abs(std::cos(frequency_[j] * t));
            break;
    }
}

Vector SignalSpec::operator()(double t) const {
    Vector out(dim());
    evaluate(t, out.span());
    return out;
}

double SignalSpec::scalar(double t) const noexcept {
    double v = 0.0;
    if (dim() == 0) return v;
    const double f = frequency_[0];
    switch (kind_) {
        case SignalKind::Zero: return 0.0;
        case SignalKind::Constant: return amplitude_[0];
        case SignalKind::AbsSin: return amplitude_[0] * std::abs(std::sin(f * t));
        case SignalKind::AbsCos: return amplitude_[0] * std::abs(std::cos(f * t));
        case SignalKind::ConstPlusAbsSin: return offset_[0] + amplitude_[0] * std::abs(std::sin(f * t));
        case SignalKind::ConstPlusAbsCos: return offset_[0] + amplitude_[0] * std::abs(std::cos(f * t));
    }
    return v;
}

SignalSpec SignalSpec::scaled(double s) const {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidArgument, "signal scale must be nonnegative");
    return {kind_, s * amplitude_, frequency_, s * offset_};
}

SimulationScenario demo_scenario(double a, double b, double t_end, double step) {
    SimulationScenario sc;
    sc.spec = demo_system();
    sc.omega = SignalSpec::abs_sin(a * Vector{0.5, 0.3, 0.1}, Vector{0.2, 0.1, 0.3});
    sc.d = SignalSpec::abs_cos(b * Vector{0.3, 0.1}, Vector{0.1, 0.2});
    sc.h1 = SignalSpec::const_plus_abs_sin(Vector{1.0}, Vector{1.0}, Vector{1.0});
    sc.h2 = SignalSpec::const_plus_abs_cos(Vector{1.0}, Vector{1.0}, Vector{1.0});
    sc.psi = sc.spec.psi_bar;
    sc.phi = SignalSpec::constant(sc.spec.phi_bar);
    sc.t_end = t_end;
    sc.step = step;
    return sc;
}

SimulationScenario extreme_scenario(const SystemSpec& spec, double a, double b, double t_end,
                                    double step) {
    SimulationScenario sc;
    sc.spec = spec;
    sc.omega = SignalSpec::constant(a * spec.omega_bar);
    sc.d = SignalSpec::constant(b * spec.d_bar);
    sc.h1 = SignalSpec::constant(Vector{spec.h_max});
    sc.h2 = SignalSpec::constant(Vector{spec.h_max});
    sc.psi = spec.psi_bar;
    sc.phi = SignalSpec::constant(spec.phi_bar);
    sc.t_end = t_end;
    sc.step = step;
    return sc;
}

namespace {

constexpr double kBoundSlack = 1e-12;

bool within(double v, double lo, double hi) {
    return v >= lo - kBoundSlack * (1.0 + std::abs(lo)) && v <= hi + kBoundSlack * (1.0 + std::abs(hi));
}

std::string fmt_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", t);
    return buf;
}

// Reports the first grid time at which component j of the signal leaves
// [0, upper_j]; one finding per signal.
void check_signal(std::vector<std::string>& out, const char* name, const SignalSpec& sig,
                  const Vector& upper, double t0, double t1, double step, bool exclude_end) {
    Vector value(sig.dim());
    const auto count = static_cast<long long>(std::floor((t1 - t0) / step + 1e-9));
    for (long long k = 0; k <= count; ++k) {
        const double t = t0 + static_cast<double>(k) * step;
        if (exclude_end && t >= t1) break;
        sig.evaluate(t, value.span());
        for (std::size_t j = 0; j < value.size(); ++j) {
            if (!std::isfinite(value[j]) || !within(value[j], 0.0, upper[j])) {
                out.push_back(std::string(name) + "[" + std::to_string(j) + "] = " +
                              fmt_time(value[j]) + " outside [0, " + fmt_time(upper[j]) +
                              "] at t = " + fmt_time(t));
                return;
            }
        }
    }
}

}  // namespace

ValidationReport validate_scenario(const SimulationScenario& sc) {
    ValidationReport report = validate_structure(sc.spec);
    if (!report.ok()) return report;
    auto& out = report.findings;
    const std::size_t n = sc.spec.n();
    const std::size_t m = sc.spec.m();

    if (!(sc.step > 0.0) || !std::isfinite(sc.step)) out.emplace_back("step must be positive");
    if (!(sc.t_end >= 0.0) || !std::isfinite(sc.t_end)) out.emplace_back("t_end must be nonnegative");
    if (sc.spec.h_max > 0.0 && sc.step > sc.spec.h_max)
        out.emplace_back("step must not exceed h_max");
    if (sc.omega.dim() != n) out.emplace_back("omega signal must have dimension n");
    if (sc.d.dim() != m) out.emplace_back("d signal must have dimension m");
    if (sc.h1.dim() != 1) out.emplace_back("h1 signal must be scalar");
    if (sc.h2.dim() != 1) out.emplace_back("h2 signal must be scalar");
    if (sc.phi.dim() != m) out.emplace_back("phi signal must have dimension m");
    if (sc.psi.size() != n) out.emplace_back("psi must have dimension n");
    if (!out.empty()) return report;

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(sc.psi[i]) || !within(sc.psi[i], 0.0, sc.spec.psi_bar[i])) {
            out.push_back("psi[" + std::to_string(i) + "] outside [0, psi_bar]");
        }
    }
    const Vector hmax{sc.spec.h_max};
    check_signal(out, "omega", sc.omega, sc.spec.omega_bar, 0.0, sc.t_end, sc.step, false);
    check_signal(out, "d", sc.d, sc.spec.d_bar, 0.0, sc.t_end, sc.step, false);
    check_signal(out, "h1", sc.h1, hmax, 0.0, sc.t_end, sc.step, false);
    check_signal(out, "h2", sc.h2, hmax, 0.0, sc.t_end, sc.step, false);
    if (sc.spec.h_max > 0.0) {
        check_signal(out, "phi", sc.phi, sc.spec.phi_bar, -sc.spec.h_max, 0.0, sc.step, true);
    }
    return report;
}

}  // namespace cdde
