#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "siolab/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace sio::cli;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(static_cast<bool>(f));
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::string tmp_path(const char* name) { return std::string("/tmp/siolab_test_") + name; }

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::trunc);
    f << body;
}

} // namespace

TEST_CASE("config parsing: assignments, comments, overrides, unknown keys") {
    const std::string path = tmp_path("cfg");
    write_file(path, "# comment line\n"
                     "function = poly:1\n"
                     "lambda = 64   # trailing comment\n"
                     "y_grid = 0.5, 1, 2\n"
                     "rel_tol = 1e-9\n"
                     "\n");
    RunConfig cfg = parse_config_file(path);
    CHECK(cfg.function == "poly:1");
    CHECK(cfg.lambda == 64.0);
    CHECK(cfg.y_grid.size() == 3);
    CHECK(cfg.pv.rel_tol == 1e-9);

    apply_override(cfg, "lambda=128");
    CHECK(cfg.lambda == 128.0);
    CHECK_THROWS_AS(apply_override(cfg, "nonsense_key=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "lambda"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "lambda=abc"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "window=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "operator=Q"), ConfigError);

    write_file(path, "no_equals_here\n");
    CHECK_THROWS_AS((void)parse_config_file(path), ConfigError);
    CHECK_THROWS_AS((void)parse_config_file("/nonexistent/zzz.cfg"), ConfigError);
}

TEST_CASE("catalog command exits 0") {
    RunConfig cfg;
    cfg.command = "catalog";
    CHECK(run(cfg) == kExitOk);
}

TEST_CASE("apply: I_lambda rows land near the antiderivative values") {
    RunConfig cfg;
    cfg.command = "apply";
    cfg.function = "const1";
    cfg.op = "I_lambda";
    cfg.lambda = 100.0;
    cfg.y_grid = {0.5, 1.0, 2.0};
    cfg.output = tmp_path("apply");
    REQUIRE(run(cfg) == kExitOk);

    const std::string csv = slurp(cfg.output + ".csv");
    CHECK(csv.find("y,value,error_estimate,truncation_bound") != std::string::npos);
    // three data rows with values near 0.5, 1, 2
    std::istringstream is(csv);
    std::string line;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'y') continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        values.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    REQUIRE(values.size() == 3);
    CHECK(values[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(values[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(values[2] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("exit-status contract") {
    // config error: unknown function label
    RunConfig bad;
    bad.command = "apply";
    bad.function = "no_such_function";
    bad.output = tmp_path("bad");
    CHECK(run(bad) == kExitConfigError);

    // config error: unknown claim
    RunConfig badclaim;
    badclaim.command = "certify";
    badclaim.claim = "Lemma99";
    badclaim.output = tmp_path("badclaim");
    CHECK(run(badclaim) == kExitConfigError);

    // config error: operator precondition violated (kappa >= 1 under H)
    RunConfig badop;
    badop.command = "apply";
    badop.function = "sinh";
    badop.op = "H";
    badop.y_grid = {0.5};
    badop.output = tmp_path("badop");
    CHECK(run(badop) == kExitConfigError);

    // certificate failure maps to exit 1
    sio::lab::BoundCertificate failing;
    failing.pass = false;
    CHECK(exit_code_for({&failing, 1}) == kExitCertificateFailure);
    sio::lab::BoundCertificate ok;
    ok.pass = true;
    CHECK(exit_code_for({&ok, 1}) == kExitOk);

    // numerical failure: a depth-starved quadrature cannot resolve the
    // lambda-scale kernel transition, so the honest budget drowns E
    RunConfig noisy;
    noisy.command = "limit-study";
    noisy.function = "const1";
    noisy.lambda_list = {256.0, 1024.0};
    noisy.y_grid = {0.5, 1.0};
    noisy.pv.max_refine_depth = 1;
    noisy.pv.base_panels = 4;
    noisy.output = tmp_path("noisy");
    CHECK(run(noisy) == kExitNumericalFailure);
}

TEST_CASE("limit-study: reduced run writes CSV + JSON with a compliant slope") {
    RunConfig cfg;
    cfg.command = "limit-study";
    cfg.function = "poly:1";
    cfg.lambda_list = {16.0, 64.0, 256.0};
    cfg.y_grid = {0.1, 0.5, 1.0, 2.0};
    cfg.pv.rel_tol = 1e-11;
    cfg.pv.abs_tol = 1e-13;
    cfg.output = tmp_path("limit");
    REQUIRE(run(cfg) == kExitOk);

    const std::string js = slurp(cfg.output + ".json");
    CHECK(js.find("\"slope\"") != std::string::npos);
    CHECK(js.find("\"pass\": true") != std::string::npos);
    const std::string csv = slurp(cfg.output + ".csv");
    CHECK(csv.find("lambda,E,E_sqrt_lambda") != std::string::npos);
}

TEST_CASE("certify: a cheap claim produces passing JSON certificates") {
    RunConfig cfg;
    cfg.command = "certify";
    cfg.claim = "Lemma3";
    cfg.output = tmp_path("cert");
    REQUIRE(run(cfg) == kExitOk);
    const std::string js = slurp(cfg.output + ".json");
    CHECK(js.find("\"claim_id\": \"Lemma3\"") != std::string::npos);
    CHECK(js.find("\"pass\": true") != std::string::npos);
    CHECK(js.find("\"measured_constant\"") != std::string::npos);
}

TEST_CASE("determinism: identical config + seed give byte-identical artifacts") {
    for (int variant = 0; variant < 2; ++variant) {
        RunConfig cfg;
        if (variant == 0) {
            cfg.command = "limit-study";
            cfg.function = "sin";
            cfg.lambda_list = {16.0, 64.0};
            cfg.y_grid = {0.5, 1.0};
        } else {
            cfg.command = "certify";
            cfg.claim = "Lemma4";
        }
        cfg.output = tmp_path("det_a");
        REQUIRE(run(cfg) <= kExitCertificateFailure);
        const std::string a_csv =
            variant == 0 ? slurp(cfg.output + ".csv") : slurp(cfg.output + ".json");
        cfg.output = tmp_path("det_b");
        REQUIRE(run(cfg) <= kExitCertificateFailure);
        const std::string b_csv =
            variant == 0 ? slurp(cfg.output + ".csv") : slurp(cfg.output + ".json");
        // bodies differ only in the embedded output path
        auto strip_output_line = [](std::string s) {
            std::istringstream is(s);
            std::string line, out;
            while (std::getline(is, line))
                if (line.find("output") == std::string::npos) out += line + "\n";
            return out;
        };
        CHECK(strip_output_line(a_csv) == strip_output_line(b_csv));
    }
}
