#pragma once

// Fixed-step integration of the delayed coupled system by the method of
// steps, plus checks of computed bounds against simulated trajectories.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdde/certificate.hpp"
#include "cdde/linalg.hpp"
#include "cdde/model.hpp"

namespace cdde {

enum class SignalKind { Zero, Constant, AbsSin, AbsCos, ConstPlusAbsSin, ConstPlusAbsCos };

std::string_view to_string(SignalKind kind) noexcept;
std::optional<SignalKind> parse_signal_kind(std::string_view name) noexcept;

// Vector-valued signal; component j evaluates to
//   zero:                0
//   constant:            amplitude_j
//   abs_sin / abs_cos:   amplitude_j |sin(frequency_j t)|  (resp. cos)
//   const_plus_abs_*:    offset_j + amplitude_j |sin(frequency_j t)|
class SignalSpec {
public:
    SignalSpec() = default;
    SignalSpec(SignalKind kind, Vector amplitude, Vector frequency, Vector offset);

    static SignalSpec zero(std::size_t dim);
    static SignalSpec constant(Vector value);
    static SignalSpec abs_sin(Vector amplitude, Vector frequency);
    static SignalSpec abs_cos(Vector amplitude, Vector frequency);
    static SignalSpec const_plus_abs_sin(Vector offset, Vector amplitude, Vector frequency);
    static SignalSpec const_plus_abs_cos(Vector offset, Vector amplitude, Vector frequency);

    SignalKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return amplitude_.size(); }
    const Vector& amplitude() const noexcept { return amplitude_; }
    const Vector& frequency() const noexcept { return frequency_; }
    const Vector& offset() const noexcept { return offset_; }

    void evaluate(double t, std::span<double> out) const noexcept;
    Vector operator()(double t) const;
    double scalar(double t) const noexcept;  // first component

    // Multiplies amplitude and offset by s >= 0.
    SignalSpec scaled(double s) const;

    friend bool operator==(const SignalSpec&, const SignalSpec&) = default;

private:
    SignalKind kind_ = SignalKind::Zero;
    Vector amplitude_;
    Vector frequency_;
    Vector offset_;
};

struct SimulationScenario {
    SystemSpec spec;
    SignalSpec omega;  // dim n
    SignalSpec d;      // dim m
    SignalSpec h1;     // dim 1
    SignalSpec h2;     // dim 1
    Vector psi;        // x(0)
    SignalSpec phi;    // y on [-h_max, 0)
    double t_end = 40.0;
    double step = 1e-3;
};

// Benchmark scenario on demo_system(): disturbances
//   w(t) = a [0.5|sin 0.2t|, 0.3|sin 0.1t|, 0.1|sin 0.3t|],
//   d(t) = b [0.3|cos 0.1t|, 0.1|cos 0.2t|],
// delays h1 = 1 + |sin t|, h2 = 1 + |cos t|, and extreme initial data.
SimulationScenario demo_scenario(double a, double b, double t_end = 40.0, double step = 1e-3);

// Worst-case constant scenario for any system: w = a omega_bar, d = b d_bar,
// h1 = h2 = h_max, x(0) = psi_bar, y = phi_bar on the history.
SimulationScenario extreme_scenario(const SystemSpec& spec, double a = 1.0, double b = 1.0,
                                    double t_end = 40.0, double step = 1e-3);

// Checks the scenario's data against the system bounds at grid points.
ValidationReport validate_scenario(const SimulationScenario& scenario);

struct Trajectory {
    double step = 0.0;
    std::vector<double> times;
    std::vector<Vector> x;
    std::vector<Vector> y;

    std::size_t size() const noexcept { return times.size(); }
};

// Magnitude beyond which a sample is reported as UnstableStep.
inline constexpr double kBlowupMagnitude = 1e12;

// Throws InvalidScenario (with every finding) or UnstableStep.
Trajectory simulate(const SimulationScenario& scenario);

inline constexpr double kDominationSlack = 1e-6;

struct DominationReport {
    // max over grid times of sample - bound, per component
    Vector x_margin;
    Vector y_margin;
    std::optional<double> first_violation;
    double slack = kDominationSlack;

    bool violated() const noexcept { return first_violation.has_value(); }
};

DominationReport verify_domination(const Trajectory& traj, const BoundCertificate& cert,
                                   double slack = kDominationSlack);

inline constexpr double kComparisonSlack = 1e-9;

// Simulates both scenarios and tests x_lo <= x_hi, y_lo <= y_hi at every
// grid time. Throws MismatchedScenarios unless the scenarios share system,
// signals and grid, and their initial data are ordered.
bool comparison_check(const SimulationScenario& lo, const SimulationScenario& hi);

// CSV with header t,x_1..x_n,y_1..y_m and, when a certificate is given,
// xb_1..xb_n,yb_1..yb_m. Numbers are printed with 9 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const BoundCertificate* cert = nullptr);

// Staircase bound sampled on a uniform grid: t,xb_1..xb_n,yb_1..yb_m.
void write_staircase_csv(std::ostream& out, const BoundCertificate& cert, double t_end,
                         double step);

}  // namespace cdde
