#pragma once

// JSON problem files and certificate documents.
//
// Problem file:
//   {
//     "system":   {"A": [[..]], "B": .., "C": .., "D": .., "h_max": 2,
//                  "omega_bar": [..], "d_bar": [..], "psi_bar": [..], "phi_bar": [..]},
//     "scenario": {"omega": SIGNAL, "d": SIGNAL, "h1": SIGNAL, "h2": SIGNAL,
//                  "psi": [..], "phi": [..] or SIGNAL},          (optional)
//     "options":  {"alpha_step": 0.001, "step": 0.001, "t_end": 40, "xi": [..]}  (optional)
//   }
//   SIGNAL = {"kind": "abs_sin", "amplitude": [..], "frequency": [..], "offset": [..]}
// Scalars are accepted wherever a vector is expected and are broadcast to
// the required dimension. Missing scenario entries default to the
// worst-case constant data of extreme_scenario().

#include <iosfwd>
#include <optional>
#include <string>

#include "cdde/certificate.hpp"
#include "cdde/model.hpp"
#include "cdde/simulator.hpp"

namespace cdde::io {

struct ProblemOptions {
    double alpha_step = kDefaultAlphaStep;
    double step = 1e-3;
    double t_end = 40.0;
    std::optional<Vector> xi;
};

struct Problem {
    SystemSpec spec;
    std::optional<SimulationScenario> scenario;
    ProblemOptions options;

    // The file's scenario (or the worst-case one) on the options' grid.
    SimulationScenario scenario_or_extreme() const;
};

// All throw Error(ParseError) on malformed input.
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

std::string certificate_to_json(const BoundCertificate& cert);
BoundCertificate certificate_from_json(const std::string& text);
BoundCertificate load_certificate(const std::string& path);

}  // namespace cdde::io
