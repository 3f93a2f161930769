// siolab command-line front end.
//
//   siolab apply       --config run.cfg --set lambda=100
//   siolab certify     --claim Lemma3
//   siolab limit-study --set function=poly:1
//   siolab catalog
//
// Configuration comes from an optional plain-text key = value file; every key
// can be overridden with --set key=value.  Artifacts (CSV/JSON) land at the
// configured output prefix and embed the resolved configuration.
#include "siolab/run_config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"numerical lab for an exponentially decaying Hilbert-type transform "
                 "and its scaling limit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string claim;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "plain-text key = value config file");
        sub->add_option("--set", overrides, "override a config key, e.g. --set lambda=256")
            ->take_all();
    };

    CLI::App* apply = app.add_subcommand("apply", "evaluate an operator on a y-grid (CSV)");
    CLI::App* certify =
        app.add_subcommand("certify", "run bound certificates and write them as JSON");
    certify->add_option("--claim", claim, "claim id (see README) or 'all'");
    CLI::App* limit =
        app.add_subcommand("limit-study", "measure the scaling-limit convergence rate");
    CLI::App* catalog = app.add_subcommand("catalog", "list built-in test functions");
    for (CLI::App* sub : {apply, certify, limit, catalog}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        sio::cli::RunConfig cfg;
        if (!config_path.empty()) cfg = sio::cli::parse_config_file(config_path);
        for (const std::string& kv : overrides) sio::cli::apply_override(cfg, kv);
        if (apply->parsed()) cfg.command = "apply";
        if (certify->parsed()) {
            cfg.command = "certify";
            if (!claim.empty()) cfg.claim = claim;
        }
        if (limit->parsed()) cfg.command = "limit-study";
        if (catalog->parsed()) cfg.command = "catalog";
        return sio::cli::run(cfg);
    } catch (const sio::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return sio::cli::kExitConfigError;
    }
}
