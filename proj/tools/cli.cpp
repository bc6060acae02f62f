#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cdde/error.hpp"
#include "cdde/simulator.hpp"
#include "cdde/stability.hpp"
#include "problem_io.hpp"

namespace cdde::cli {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string list(const Vector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ParseError:
        case ErrorCode::InvalidScenario:
        case ErrorCode::MismatchedScenarios:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NonFinite:
            return kInput;
        case ErrorCode::InvalidArgument:
            return e.pipeline_step() > 0 ? kFail : kInput;
        default:
            return kFail;
    }
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    f << contents;
    if (!f) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

std::size_t thread_cap() {
    std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CDDE_BOUND_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) cap = static_cast<std::size_t>(v);
    }
    return cap;
}

// Runs job(i) for i < count on up to thread_cap() threads. Results land in
// slot i, so ordering never depends on completion order; the first failing
// index's exception is rethrown.
template <typename Result, typename Job>
std::vector<Result> parallel_map(std::size_t count, Job job) {
    std::vector<std::optional<Result>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i] = job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(thread_cap(), count);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    std::vector<Result> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

struct Flags {
    std::string file;
    std::optional<double> alpha_step;
    std::vector<double> xi;
    std::string out;
    double a = 1.0;
    double b = 1.0;
    std::optional<double> step;
    std::optional<double> t_end;
    bool with_bounds = false;
    bool sweep = false;
    std::string cert;
};

io::Problem load(const Flags& f) {
    io::Problem p = io::load_problem(f.file);
    if (f.alpha_step) p.options.alpha_step = *f.alpha_step;
    if (!f.xi.empty()) p.options.xi = Vector(f.xi);
    if (f.step) p.options.step = *f.step;
    if (f.t_end) p.options.t_end = *f.t_end;
    return p;
}

BoundCertificate certify(const io::Problem& p) {
    CertificateOptions o;
    o.alpha_step = p.options.alpha_step;
    o.xi = p.options.xi;
    return compute_certificate(p.spec, o);
}

SimulationScenario scaled_scenario(const io::Problem& p, double a, double b) {
    SimulationScenario sc = p.scenario_or_extreme();
    sc.omega = sc.omega.scaled(a);
    sc.d = sc.d.scaled(b);
    return sc;
}

int cmd_check(const Flags& f, std::ostream& out) {
    const io::Problem p = load(f);
    auto line = [&](const std::string& what, bool ok) {
        out << what << ": " << (ok ? "pass" : "FAIL") << '\n';
        return ok;
    };
    const ValidationReport structure = validate_structure(p.spec);
    line("structure", structure.ok());
    for (const auto& finding : structure.findings) out << "  " << finding << '\n';
    if (!structure.ok()) {
        out << "result: hypotheses fail\n";
        return kFail;
    }
    const StabilityReport r = check_joint_condition(p.spec, p.options.xi);
    bool all = true;
    all &= line("A Metzler", r.a_is_metzler);
    all &= line("B, C, D nonnegative", r.bcd_nonnegative);
    all &= line("D Schur", r.d_is_schur);
    all &= line("A Hurwitz", is_metzler_hurwitz(p.spec.A));
    all &= line("joint condition s(A + B(I - D)^-1 C) < 0", r.joint_condition_holds);
    for (const auto& d : r.diagnostics) out << "  " << d << '\n';
    if (r.witness_p) out << "witness p = " << list(*r.witness_p) << '\n';
    if (r.witness_q) out << "witness q = " << list(*r.witness_q) << '\n';
    out << (all ? "result: all hypotheses hold\n" : "result: hypotheses fail\n");
    return all ? kPass : kFail;
}

int cmd_bound(const Flags& f, std::ostream& out) {
    const io::Problem p = load(f);
    const BoundCertificate cert = certify(p);
    const std::string doc = io::certificate_to_json(cert);
    if (f.out.empty()) {
        out << doc;
        return kPass;
    }
    write_file(f.out + ".json", doc);
    std::ostringstream csv;
    write_staircase_csv(csv, cert, p.options.t_end, p.options.step);
    write_file(f.out + "_staircase.csv", csv.str());
    out << "mu = " << num(cert.mu) << " (raw " << num(cert.mu_raw) << "), T = " << num(cert.convergence.T)
        << ", T* = " << num(cert.T_star) << ", constant_bound = " << (cert.constant_bound ? "true" : "false")
        << '\n';
    out << "wrote " << f.out << ".json and " << f.out << "_staircase.csv\n";
    return kPass;
}

int cmd_simulate(const Flags& f, std::ostream& out) {
    const io::Problem p = load(f);
    const SimulationScenario sc = scaled_scenario(p, f.a, f.b);
    std::optional<BoundCertificate> cert;
    if (f.with_bounds) cert = certify(p);
    const Trajectory tr = simulate(sc);
    std::ostringstream csv;
    write_trajectory_csv(csv, tr, cert ? &*cert : nullptr);
    if (f.out.empty()) {
        out << csv.str();
    } else {
        write_file(f.out, csv.str());
        out << "wrote " << tr.size() << " rows to " << f.out << '\n';
    }
    return kPass;
}

int cmd_verify(const Flags& f, std::ostream& out) {
    const io::Problem p = load(f);
    const BoundCertificate cert = f.cert.empty() ? certify(p) : io::load_certificate(f.cert);
    if (cert.eta.size() != p.spec.n() || cert.varsigma.size() != p.spec.m()) {
        throw Error(ErrorCode::DimensionMismatch, "certificate dimensions do not match the system");
    }

    std::vector<std::pair<double, double>> cases;
    if (f.sweep) {
        for (double a : {0.0, 0.5, 1.0})
            for (double b : {0.0, 1.0}) cases.emplace_back(a, b);
    } else {
        cases.emplace_back(f.a, f.b);
    }
    const auto reports = parallel_map<DominationReport>(cases.size(), [&](std::size_t i) {
        return verify_domination(simulate(scaled_scenario(p, cases[i].first, cases[i].second)), cert);
    });

    out << "certificate: mu = " << num(cert.mu) << ", T* = " << num(cert.T_star)
        << ", constant_bound = " << (cert.constant_bound ? "true" : "false") << '\n';
    bool all = true;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const DominationReport& r = reports[i];
        out << "scenario a=" << num(cases[i].first) << " b=" << num(cases[i].second) << ": ";
        if (r.violated()) {
            all = false;
            out << "FAIL, first violation at t = " << num(*r.first_violation) << '\n';
        } else {
            out << "pass\n";
        }
        out << "  max x - bound = " << list(r.x_margin) << '\n';
        out << "  max y - bound = " << list(r.y_margin) << '\n';
    }
    out << (all ? "result: no violation beyond slack " : "result: violation beyond slack ")
        << num(kDominationSlack) << '\n';
    return all ? kPass : kFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified componentwise bounds for positive coupled differential-difference systems",
                 "cdde-bound"};
    app.require_subcommand(1);
    Flags f;

    auto file = [&](CLI::App* sub) {
        sub->add_option("file", f.file, "JSON problem file")->required();
    };
    auto xi = [&](CLI::App* sub) {
        sub->add_option("--xi", f.xi, "weights of the coupling solve, comma separated (default all ones)")
            ->delimiter(',');
    };
    auto alpha = [&](CLI::App* sub) {
        sub->add_option("--alpha-step", f.alpha_step, "decay-rate grid step (default 0.001)")
            ->check(CLI::PositiveNumber);
    };
    auto grid = [&](CLI::App* sub) {
        sub->add_option("--a", f.a, "scale of the disturbance w (default 1)")->check(CLI::NonNegativeNumber);
        sub->add_option("--b", f.b, "scale of the disturbance d (default 1)")->check(CLI::NonNegativeNumber);
        sub->add_option("--step", f.step, "simulation step (default 0.001)")->check(CLI::PositiveNumber);
        sub->add_option("--t-end", f.t_end, "simulation horizon (default 40)")->check(CLI::NonNegativeNumber);
    };

    CLI::App* check = app.add_subcommand("check", "validate the system and test the stability hypotheses");
    file(check);
    xi(check);

    CLI::App* bound = app.add_subcommand("bound", "compute the bound certificate");
    file(bound);
    alpha(bound);
    xi(bound);
    bound->add_option("--out", f.out, "write OUT.json and OUT_staircase.csv instead of printing");
    bound->add_option("--step", f.step, "staircase table step")->check(CLI::PositiveNumber);
    bound->add_option("--t-end", f.t_end, "staircase table horizon")->check(CLI::NonNegativeNumber);

    CLI::App* sim = app.add_subcommand("simulate", "simulate the scenario and write a CSV trajectory");
    file(sim);
    grid(sim);
    alpha(sim);
    xi(sim);
    sim->add_option("--out", f.out, "CSV output path (default stdout)");
    sim->add_flag("--with-bounds", f.with_bounds, "append the staircase bound columns");

    CLI::App* verify = app.add_subcommand("verify", "check simulated trajectories against the certificate");
    file(verify);
    grid(verify);
    alpha(verify);
    xi(verify);
    verify->add_flag("--sweep", f.sweep, "run the six scenarios a in {0, 0.5, 1}, b in {0, 1}");
    verify->add_option("--cert", f.cert, "use a certificate JSON instead of computing one");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "cdde-bound: " << e.what() << '\n';
        if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
        return kInput;
    }

    try {
        if (check->parsed()) return cmd_check(f, out);
        if (bound->parsed()) return cmd_bound(f, out);
        if (sim->parsed()) return cmd_simulate(f, out);
        return cmd_verify(f, out);
    } catch (const Error& e) {
        err << "cdde-bound: ";
        if (e.pipeline_step() > 0) err << "certificate step " << e.pipeline_step() << " failed: ";
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace cdde::cli
