// CLI front end: run configuration (plain-text key = value files plus
// overrides), the command runner, and the CSV/JSON artifact writers.
// Outputs carry the resolved configuration in their headers and are
// byte-reproducible for identical config + seed.
#pragma once

#include "siolab/scaling_lab.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sio::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificateFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

struct RunConfig {
    std::string command = "catalog"; // apply | certify | limit-study | catalog
    std::string function = "const1";
    std::string op = "I_lambda"; // H | I | I_lambda
    double lambda = 100.0;
    std::vector<double> lambda_list = lab::default_lambda_sweep();
    std::vector<double> y_grid = lab::default_y_grid();
    int weight_order = -9999; // m in the target weight; sentinel: derive from the function
    std::string claim = "all";
    funcspace::Interval window{-10.0, 10.0};
    funcspace::Interval window2{-20.0, 20.0};
    double alpha = 0.5;
    quad::PVConfig pv{};
    std::string output = "out";
    std::uint64_t seed = 0x5EED;

    //! resolved key = value view (config header embedding; sorted keys)
    std::map<std::string, std::string> to_map() const;
};

//! Parses one "key = value" assignment; unknown keys are errors.
void apply_assignment(RunConfig& cfg, const std::string& key, const std::string& value);
//! "key=value" form used by --set.
void apply_override(RunConfig& cfg, const std::string& keyval);
//! Plain-text config file: one assignment per line, '#' comments.
RunConfig parse_config_file(const std::string& path);

//! Shortest round-trip decimal representation (CSV and JSON use the same).
std::string format_double(double v);

//! Maps certificate outcomes to the exit-status contract.
int exit_code_for(std::span<const lab::BoundCertificate> certs);

//! Known claim identifiers for `certify --claim`.
std::vector<std::string> known_claims();

//! Runs the configured command, writing artifacts under cfg.output; returns
//! the process exit status (0 ok / 1 certificate failure / 2 config error /
//! 3 numerical failure).
int run(const RunConfig& cfg);

} // namespace sio::cli
