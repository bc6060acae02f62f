#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdde/certificate.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cdde::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json demo() { return json::parse(slurp(CDDE_DEMO_FILE)); }

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("cdde_cli_" + std::to_string(std::rand()) + "_" +
                                             std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& contents) const {
        const fs::path p = path_ / name;
        std::ofstream(p, std::ios::binary) << contents;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("check") {
    const Run ok = run({"check", CDDE_DEMO_FILE});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("result: all hypotheses hold") != std::string::npos);
    CHECK(ok.out.find("D Schur: pass") != std::string::npos);

    TempDir tmp;
    json bad = demo();
    bad["system"]["D"] = json::array({json::array({1, 0}), json::array({0, 1})});
    const Run schur = run({"check", tmp.file("schur.json", bad.dump())});
    CHECK(schur.code == 1);
    CHECK(schur.out.find("D not Schur") != std::string::npos);

    json neg = demo();
    neg["system"]["B"][0][1] = -0.1;
    const Run sign = run({"check", tmp.file("neg.json", neg.dump())});
    CHECK(sign.code == 1);
    CHECK(sign.out.find("B not nonnegative at (0, 1)") != std::string::npos);

    CHECK(run({"check", tmp.file("broken.json", "{\"system\": [1, 2")}).code == 2);
    CHECK(run({"check", tmp.file("shape.json", R"({"system": {"A": [[1, 2]]}})")}).code == 2);
    CHECK(run({"check", tmp.path("missing.json")}).code == 2);
    json typo = demo();
    typo["system"]["Dmat"] = 1;
    CHECK(run({"check", tmp.file("typo.json", typo.dump())}).code == 2);
}

TEST_CASE("bound") {
    const Run r = run({"bound", CDDE_DEMO_FILE});
    REQUIRE(r.code == 0);
    const json cert = json::parse(r.out);
    CHECK(std::abs(cert["mu_raw"].get<double>() - 0.0707) <= 5e-4);
    CHECK(std::abs(cert["mu"].get<double>() - 0.0707) <= 5e-4);
    CHECK(cert["T_star"].get<double>() == 2.0);
    CHECK(cert["constant_bound"].get<bool>() == false);
    CHECK(std::abs(cert["T"].get<double>() - 1.2056) <= 0.05);
    for (const char* key : {"eta", "varsigma", "p", "q", "per_component_T", "per_component_alpha"})
        CHECK(cert.contains(key));

    const Run fine = run({"bound", CDDE_DEMO_FILE, "--alpha-step", "0.0005"});
    REQUIRE(fine.code == 0);
    CHECK(std::abs(json::parse(fine.out)["T"].get<double>() - 1.2056) <= 0.05);

    TempDir tmp;
    json small = demo();
    const cdde::UltimateBound ub = cdde::ultimate_bound(cdde::demo_system());
    small["system"]["psi_bar"] = (0.1 * ub.eta).values();
    small["system"]["phi_bar"] = (0.1 * ub.varsigma).values();
    small.erase("scenario");
    const Run c = run({"bound", tmp.file("small.json", small.dump())});
    REQUIRE(c.code == 0);
    CHECK(json::parse(c.out)["constant_bound"].get<bool>());

    const std::string stem = tmp.path("demo");
    const Run w = run({"bound", CDDE_DEMO_FILE, "--out", stem});
    REQUIRE(w.code == 0);
    CHECK(slurp(stem + ".json") == r.out);
    const std::string csv = slurp(stem + "_staircase.csv");
    CHECK(lines(csv) == 40002);
    CHECK(csv.rfind("t,xb_1,xb_2,xb_3,yb_1,yb_2\n", 0) == 0);

    json unstable = demo();
    unstable["system"]["A"][0][0] = 1.0;
    const Run u = run({"bound", tmp.file("unstable.json", unstable.dump())});
    CHECK(u.code == 1);
    CHECK(u.err.find("step 1") != std::string::npos);

    CHECK(run({"bound", CDDE_DEMO_FILE, "--xi", "1,1,1"}).code == 2);
    CHECK(run({"bound", CDDE_DEMO_FILE, "--xi", "1,2,1,0.5,3"}).code == 0);
}

TEST_CASE("simulate") {
    TempDir tmp;
    const std::string out = tmp.path("traj.csv");
    const Run r = run({"simulate", CDDE_DEMO_FILE, "--a", "1", "--b", "1", "--out", out});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(out);
    CHECK(lines(csv) == 40002);  // header + 40001 samples
    CHECK(csv.rfind("t,x_1,x_2,x_3,y_1,y_2\n0,2,5,3,", 0) == 0);

    const Run again = run({"simulate", CDDE_DEMO_FILE, "--out", tmp.path("again.csv")});
    CHECK(slurp(tmp.path("again.csv")) == csv);

    json zero = demo();
    zero["scenario"]["psi"] = json::array({0, 0, 0});
    zero["scenario"]["phi"] = json::array({0, 0});
    const Run z = run({"simulate", tmp.file("zero.json", zero.dump()), "--a", "0", "--b", "0", "--t-end", "5"});
    REQUIRE(z.code == 0);
    std::istringstream rows(z.out);
    std::string line;
    std::getline(rows, line);
    std::size_t count = 0;
    bool all_zero = true;
    while (std::getline(rows, line)) {
        ++count;
        all_zero = all_zero && line.substr(line.find(',')) == ",0,0,0,0,0";
    }
    CHECK(count == 5001);
    CHECK(all_zero);

    const Run bad = run({"simulate", CDDE_DEMO_FILE, "--a", "2"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("InvalidScenario") != std::string::npos);

    const Run bounds = run({"simulate", CDDE_DEMO_FILE, "--t-end", "1", "--with-bounds"});
    REQUIRE(bounds.code == 0);
    CHECK(bounds.out.rfind("t,x_1,x_2,x_3,y_1,y_2,xb_1,xb_2,xb_3,yb_1,yb_2\n", 0) == 0);
}

TEST_CASE("verify") {
    for (const char* a : {"0", "0.5", "1"}) {
        for (const char* b : {"0", "1"}) {
            CAPTURE(a);
            CAPTURE(b);
            const Run r = run({"verify", CDDE_DEMO_FILE, "--a", a, "--b", b});
            CHECK(r.code == 0);
            CHECK(r.out.find(": pass") != std::string::npos);
        }
    }

    // a certificate for a smaller disturbance bound is beaten by the real one
    TempDir tmp;
    json small = demo();
    small["system"]["omega_bar"] = json::array({0.05, 0.03, 0.01});
    small["system"]["d_bar"] = json::array({0.03, 0.01});
    small.erase("scenario");
    const std::string cert = tmp.path("small");
    REQUIRE(run({"bound", tmp.file("small.json", small.dump()), "--out", cert}).code == 0);
    json worst = demo();
    worst.erase("scenario");
    const Run v = run({"verify", tmp.file("worst.json", worst.dump()), "--cert", cert + ".json", "--t-end", "60"});
    CHECK(v.code == 1);
    CHECK(v.out.find("first violation at t = ") != std::string::npos);

    // zero data: margins are minus the bound at the horizon
    json zero = demo();
    zero["scenario"]["omega"] = {{"kind", "zero"}};
    zero["scenario"]["d"] = {{"kind", "zero"}};
    zero["scenario"]["psi"] = json::array({0, 0, 0});
    zero["scenario"]["phi"] = json::array({0, 0});
    const Run z = run({"verify", tmp.file("zero.json", zero.dump()), "--t-end", "10"});
    CHECK(z.code == 0);
    const cdde::BoundCertificate c = cdde::compute_certificate(cdde::demo_system());
    const cdde::StateBound end = cdde::staircase(c, 10.0);
    char expect[200];
    std::snprintf(expect, sizeof expect, "max x - bound = [%.9g, %.9g, %.9g]", -end.x[0], -end.x[1], -end.x[2]);
    CHECK(z.out.find(expect) != std::string::npos);
}

TEST_CASE("verify sweep is deterministic across thread counts") {
    setenv("CDDE_BOUND_THREADS", "1", 1);
    const Run one = run({"verify", CDDE_DEMO_FILE, "--sweep", "--t-end", "20"});
    setenv("CDDE_BOUND_THREADS", "6", 1);
    const Run six = run({"verify", CDDE_DEMO_FILE, "--sweep", "--t-end", "20"});
    unsetenv("CDDE_BOUND_THREADS");
    CHECK(one.code == 0);
    CHECK(one.out == six.out);
    std::size_t passes = 0;
    for (std::size_t pos = one.out.find(": pass"); pos != std::string::npos; pos = one.out.find(": pass", pos + 1)) ++passes;
    CHECK(passes == 6);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"bound"}).code == 2);
    CHECK(run({"bound", CDDE_DEMO_FILE, "--alpha-step", "-1"}).code == 2);
    const Run help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("verify") != std::string::npos);
}
