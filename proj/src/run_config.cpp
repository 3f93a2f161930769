#include "siolab/run_config.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sio::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + v);
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos, 0);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for '" + key + "': " + v);
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

funcspace::Interval parse_interval(const std::string& key, const std::string& v) {
    const auto xs = parse_list(key, v);
    if (xs.size() != 2 || !(xs[0] < xs[1]))
        throw ConfigError("'" + key + "' needs 'lo,hi' with lo < hi");
    return {xs[0], xs[1]};
}

std::string join(std::span<const double> xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_double(xs[i]);
    }
    return out;
}

json cert_to_json(const lab::BoundCertificate& c) {
    json samples = json::array();
    for (const auto& s : c.samples) {
        samples.push_back({{"input", s.input},
                           {"lhs", s.lhs},
                           {"rhs", s.rhs},
                           {"ratio", s.ratio},
                           {"note", s.note}});
    }
    return {{"claim_id", c.claim_id},
            {"rhs_form", c.rhs_form},
            {"grid", c.grid_desc},
            {"seed", c.seed},
            {"measured_constant", c.measured_constant},
            {"pass", c.pass},
            {"samples", samples}};
}

json ratefit_to_json(const lab::RateFit& f) {
    json points = json::array();
    for (const auto& [x, y] : f.points) points.push_back({x, y});
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"points", points},
            {"lambdas", f.lambdas},
            {"errors", f.errors},
            {"budgets", f.budgets},
            {"targets", f.targets},
            {"exact_zero", f.exact_zero},
            {"budget_ok", f.budget_ok},
            {"uniform_ratio", f.uniform_ratio},
            {"max_step_growth", f.max_step_growth}};
}

json config_to_json(const RunConfig& cfg) {
    json out;
    for (const auto& [k, v] : cfg.to_map()) out[k] = v;
    return out;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << body;
}

std::string csv_header(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.to_map()) out += "# " + k + " = " + v + "\n";
    return out;
}

int resolved_weight_order(const RunConfig& cfg, const funcspace::TestFunction& f) {
    return cfg.weight_order != -9999 ? cfg.weight_order : f.claimed_class.m;
}

// --------------------------------------------------------------- commands --

int run_catalog(const RunConfig&) {
    for (const auto& f : funcspace::catalog()) {
        std::cout << f.label << "  (m=" << f.claimed_class.m
                  << ", kappa=" << f.claimed_class.kappa
                  << (f.has_deriv() ? ", deriv" : "")
                  << (f.has_antideriv() ? ", antideriv" : "") << ")\n";
    }
    return kExitOk;
}

int run_apply(const RunConfig& cfg) {
    const auto& f = funcspace::catalog_lookup(cfg.function);
    std::string body = csv_header(cfg);
    body += "y,value,error_estimate,truncation_bound\n";
    for (double y : cfg.y_grid) {
        quad::QuadResult r;
        if (cfg.op == "H")
            r = ops::apply_H(f, y, cfg.pv);
        else if (cfg.op == "I")
            r = ops::apply_I(f, y, cfg.pv);
        else if (cfg.op == "I_lambda")
            r = ops::apply_I_lambda(f, cfg.lambda, y, cfg.pv);
        else
            throw ConfigError("unknown operator: " + cfg.op);
        body += format_double(y) + "," + format_double(r.value) + "," +
                format_double(r.error_estimate) + "," + format_double(r.truncation_bound) +
                "\n";
    }
    write_text_file(cfg.output + ".csv", body);
    return kExitOk;
}

int run_limit_study(const RunConfig& cfg) {
    const auto& f = funcspace::catalog_lookup(cfg.function);
    const int m = resolved_weight_order(cfg, f);
    const lab::RateFit fit =
        lab::measure_scaling_limit(f, cfg.lambda_list, cfg.y_grid, m, cfg.pv);
    const lab::RateVerdict verdict = lab::rate_verdict(fit);

    std::string body = csv_header(cfg);
    body += "lambda,E,E_sqrt_lambda\n";
    for (std::size_t i = 0; i < fit.lambdas.size(); ++i)
        body += format_double(fit.lambdas[i]) + "," + format_double(fit.errors[i]) + "," +
                format_double(fit.errors[i] * std::sqrt(fit.lambdas[i])) + "\n";
    write_text_file(cfg.output + ".csv", body);

    json out = {{"config", config_to_json(cfg)},
                {"ratefit", ratefit_to_json(fit)},
                {"pass", verdict.pass},
                {"verdict", verdict.reason}};
    write_text_file(cfg.output + ".json", out.dump(2) + "\n");

    if (!fit.budget_ok) return kExitNumericalFailure;
    return kExitOk;
}

const funcspace::TestFunction& cat(const char* label) {
    return funcspace::catalog_lookup(label);
}

funcspace::SchauderParams params_of(int m, double kappa, double alpha) {
    funcspace::SchauderParams p;
    p.m = m;
    p.kappa = kappa;
    p.alpha = alpha;
    return p;
}

void append_window_comparison(std::vector<lab::BoundCertificate>& certs,
                              const lab::WindowComparison& cmp, const char* claim) {
    lab::BoundCertificate summary;
    summary.claim_id = claim;
    summary.rhs_form = "window-stability of the ratio estimate";
    summary.grid_desc = cmp.small.grid_desc + " vs " + cmp.large.grid_desc;
    summary.measured_constant = cmp.large.measured_constant;
    summary.pass = cmp.small.pass && cmp.large.pass && std::abs(cmp.rel_change) < 0.10;
    lab::Sample s;
    s.lhs = cmp.small.measured_constant;
    s.rhs = cmp.large.measured_constant;
    s.ratio = cmp.rel_change;
    s.note = "relative change under window growth";
    summary.samples.push_back(std::move(s));
    certs.push_back(cmp.small);
    certs.push_back(cmp.large);
    certs.push_back(std::move(summary));
}

void append_endpoint_demo(std::vector<lab::BoundCertificate>& certs,
                          const lab::EndpointDemo& d, const char* claim) {
    lab::BoundCertificate summary;
    summary.claim_id = claim;
    summary.rhs_form = "upgraded target window-stable; unchanged target grows";
    summary.grid_desc = d.upgraded_small.grid_desc + " vs " + d.upgraded_large.grid_desc;
    summary.measured_constant = d.upgraded_large.measured_constant;
    summary.pass = d.pass;
    lab::Sample s;
    s.ratio = d.upgraded_change;
    s.note = "upgraded-target relative change";
    summary.samples.push_back(s);
    lab::Sample g;
    g.ratio = d.naive_growth;
    g.note = "unchanged-target growth factor";
    summary.samples.push_back(g);
    certs.push_back(std::move(summary));
}

lab::BoundCertificate lemma5_certificate(const RunConfig& cfg) {
    lab::BoundCertificate cert;
    cert.claim_id = "Lemma5";
    cert.rhs_form = "(a),(b) stated forms with constant 1; (c) absolute constant <= 4";
    cert.grid_desc = "y=1, t/y in {0.3,0.5,0.9}, lambda in {50,100}";
    cert.seed = cfg.seed;
    bool pass = true;
    std::vector<double> c_by_lambda(2, 0.0);
    const double y = 1.0;
    for (const char* label : {"const1", "poly:1", "sin", "lorentzian"}) {
        int li = 0;
        for (double lambda : {50.0, 100.0}) {
            for (double tf : {0.3, 0.5, 0.9}) {
                const double t = tf * y;
                const double delta = lab::lemma5_default_delta(lambda, y);
                const auto r = lab::certify_lemma5(cat(label), lambda, y, t, delta, cfg.pv);
                pass = pass && r.a <= 1.0 + 1e-6 && r.b <= 1.0 + 1e-6 && r.c <= 4.0 + 1e-6;
                cert.measured_constant = std::max(cert.measured_constant, r.c);
                c_by_lambda[li] = std::max(c_by_lambda[li], r.c);
                lab::Sample s;
                s.input = {lambda, y, t, delta};
                s.ratio = r.c;
                s.lhs = r.a;
                s.rhs = r.b;
                s.note = std::string(label) + " (lhs=ratio_a, rhs=ratio_b, ratio=ratio_c)";
                cert.samples.push_back(std::move(s));
            }
            ++li;
        }
    }
    pass = pass && (c_by_lambda[0] <= 1e-14 || c_by_lambda[1] / c_by_lambda[0] <= 1.05);
    cert.pass = pass;
    return cert;
}

std::vector<lab::BoundCertificate> thm3_certificates(const RunConfig& cfg, json* ratefits) {
    std::vector<lab::BoundCertificate> certs;
    for (const char* label : {"const1", "poly:1", "poly:2", "sin"}) {
        const auto& f = cat(label);
        const auto fit = lab::measure_scaling_limit(f, cfg.lambda_list, cfg.y_grid,
                                                    f.claimed_class.m, cfg.pv);
        const auto verdict = lab::rate_verdict(fit);
        lab::BoundCertificate c;
        c.claim_id = std::string("Thm3.") + label;
        c.rhs_form = "C lambda^{-1/2} ||phi||_{C1,(m)} in the (m+1)-weighted sup";
        c.grid_desc = "lambda sweep n=" + std::to_string(cfg.lambda_list.size());
        c.measured_constant = fit.exact_zero ? 0.0 : fit.uniform_ratio;
        c.pass = verdict.pass;
        lab::Sample s;
        s.ratio = fit.slope;
        s.note = verdict.reason;
        c.samples.push_back(std::move(s));
        certs.push_back(std::move(c));
        if (ratefits) (*ratefits)[label] = ratefit_to_json(fit);
    }
    return certs;
}

std::vector<lab::BoundCertificate> run_claim(const RunConfig& cfg, const std::string& claim,
                                             json* extra) {
    std::vector<lab::BoundCertificate> certs;
    const double xs[] = {-20.0, -10.0, -5.0, -3.5, 3.5, 5.0, 10.0, 20.0};
    if (claim == "Lemma1.12") {
        for (auto [m, k] : {std::pair{0, 0.0}, {1, 0.5}, {-1, -0.5}})
            certs.push_back(lab::certify_lemma1(m, k, xs, cfg.pv));
    } else if (claim == "Lemma1.13") {
        for (int m : {0, 1, -1}) certs.push_back(lab::certify_lemma1(m, -1.0, xs, cfg.pv));
    } else if (claim == "Lemma3" || claim == "Lemma3.a" || claim == "Lemma3.b") {
        certs.push_back(lab::certify_lemma3(10, 10, 10, 10, cfg.pv));
    } else if (claim == "Lemma4") {
        const double ls[] = {64.0, 128.0, 256.0, 512.0, 1024.0};
        certs.push_back(lab::certify_lemma4(cat("poly:1"), ls, 1.0, cfg.pv));
        certs.push_back(lab::certify_lemma4(cat("sin"), ls, 1.0, cfg.pv));
    } else if (claim == "Lemma5" || claim == "Lemma5.a" || claim == "Lemma5.b" ||
               claim == "Lemma5.c") {
        certs.push_back(lemma5_certificate(cfg));
    } else if (claim == "Lemma6") {
        const double ls[] = {16.0, 64.0, 256.0, 1024.0};
        certs.push_back(lab::certify_lemma6(cat("sin"), ls, 1.0, cfg.pv));
        certs.push_back(lab::certify_lemma6(cat("poly:1"), ls, 1.0, cfg.pv));
    } else if (claim == "Lemma7") {
        const double ls[] = {100.0, 200.0, 400.0, 800.0};
        certs.push_back(lab::certify_lemma7(cat("const1"), ls, 1.0, cfg.pv));
        certs.push_back(lab::certify_lemma7(cat("poly:2"), ls, 1.0, cfg.pv));
    } else if (claim == "Lemma8") {
        const double ls[] = {100.0, 200.0, 400.0, 800.0};
        certs.push_back(lab::certify_lemma8(cat("const1"), ls, 0.3, cfg.pv));
        certs.push_back(lab::certify_lemma8(cat("sin"), ls, 0.3, cfg.pv));
    } else if (claim == "Thm1.10") {
        const funcspace::TestFunction catal[] = {cat("sin"), cat("lorentzian"), cat("tanh")};
        append_window_comparison(
            certs,
            lab::compare_windows_H(params_of(0, 0.0, cfg.alpha), catal, cfg.window,
                                   cfg.window2, cfg.pv),
            "Thm1.10");
    } else if (claim == "Thm1.11") {
        const funcspace::TestFunction catal[] = {cat("edecay")};
        append_endpoint_demo(certs,
                             lab::endpoint_demo_H(params_of(-1, -1.0, cfg.alpha), catal,
                                                  cfg.window, cfg.window2, cfg.pv),
                             "Thm1.11");
    } else if (claim == "Thm2.interior") {
        const funcspace::TestFunction catal[] = {cat("sinh"), cat("sin_cosh")};
        append_window_comparison(
            certs,
            lab::compare_windows_I(params_of(0, 1.0, cfg.alpha), catal, cfg.window,
                                   cfg.window2, cfg.pv),
            "Thm2.interior");
    } else if (claim == "Thm2.endpoint") {
        const funcspace::TestFunction catal[] = {cat("const1")};
        append_endpoint_demo(certs,
                             lab::endpoint_demo_I(params_of(0, 0.0, cfg.alpha), catal,
                                                  cfg.window, cfg.window2, cfg.pv),
                             "Thm2.endpoint");
    } else if (claim == "Thm3") {
        certs = thm3_certificates(cfg, extra);
    } else {
        throw ConfigError("unknown claim: " + claim);
    }
    return certs;
}

int run_certify(const RunConfig& cfg) {
    std::vector<lab::BoundCertificate> certs;
    json extra;
    if (cfg.claim == "all") {
        for (const std::string& c : known_claims())
            if (c != "all")
                for (auto& cert : run_claim(cfg, c, &extra)) certs.push_back(std::move(cert));
    } else {
        certs = run_claim(cfg, cfg.claim, &extra);
    }
    json out;
    out["config"] = config_to_json(cfg);
    json arr = json::array();
    for (const auto& c : certs) arr.push_back(cert_to_json(c));
    out["certificates"] = arr;
    if (!extra.is_null()) out["ratefits"] = extra;
    write_text_file(cfg.output + ".json", out.dump(2) + "\n");
    return exit_code_for(certs);
}

} // namespace

std::map<std::string, std::string> RunConfig::to_map() const {
    std::map<std::string, std::string> m;
    m["command"] = command;
    m["function"] = function;
    m["operator"] = op;
    m["lambda"] = format_double(lambda);
    m["lambda_list"] = join(lambda_list);
    m["y_grid"] = join(y_grid);
    m["weight_order"] = weight_order == -9999 ? "auto" : std::to_string(weight_order);
    m["claim"] = claim;
    m["window"] = format_double(window.lo) + "," + format_double(window.hi);
    m["window2"] = format_double(window2.lo) + "," + format_double(window2.hi);
    m["alpha"] = format_double(alpha);
    m["fold_radius"] = format_double(pv.fold_radius);
    m["truncation_radius"] = format_double(pv.truncation_radius);
    m["base_panels"] = std::to_string(pv.base_panels);
    m["max_refine_depth"] = std::to_string(pv.max_refine_depth);
    m["rel_tol"] = format_double(pv.rel_tol);
    m["abs_tol"] = format_double(pv.abs_tol);
    m["output"] = output;
    std::ostringstream seed_os;
    seed_os << "0x" << std::hex << seed;
    m["seed"] = seed_os.str();
    return m;
}

void apply_assignment(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "command") {
        if (value != "apply" && value != "certify" && value != "limit-study" &&
            value != "catalog")
            throw ConfigError("unknown command: " + value);
        cfg.command = value;
    } else if (key == "function") {
        cfg.function = value;
    } else if (key == "operator") {
        if (value != "H" && value != "I" && value != "I_lambda")
            throw ConfigError("unknown operator: " + value);
        cfg.op = value;
    } else if (key == "lambda") {
        cfg.lambda = parse_double(key, value);
    } else if (key == "lambda_list") {
        cfg.lambda_list = parse_list(key, value);
    } else if (key == "y_grid") {
        if (value == "default")
            cfg.y_grid = lab::default_y_grid();
        else
            cfg.y_grid = parse_list(key, value);
    } else if (key == "weight_order") {
        cfg.weight_order = static_cast<int>(parse_long(key, value));
    } else if (key == "claim") {
        cfg.claim = value;
    } else if (key == "window") {
        cfg.window = parse_interval(key, value);
    } else if (key == "window2") {
        cfg.window2 = parse_interval(key, value);
    } else if (key == "alpha") {
        cfg.alpha = parse_double(key, value);
    } else if (key == "fold_radius") {
        cfg.pv.fold_radius = parse_double(key, value);
    } else if (key == "truncation_radius") {
        cfg.pv.truncation_radius = parse_double(key, value);
    } else if (key == "base_panels") {
        cfg.pv.base_panels = static_cast<int>(parse_long(key, value));
    } else if (key == "max_refine_depth") {
        cfg.pv.max_refine_depth = static_cast<int>(parse_long(key, value));
    } else if (key == "rel_tol") {
        cfg.pv.rel_tol = parse_double(key, value);
    } else if (key == "abs_tol") {
        cfg.pv.abs_tol = parse_double(key, value);
    } else if (key == "output") {
        cfg.output = value;
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

void apply_override(RunConfig& cfg, const std::string& keyval) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + keyval);
    apply_assignment(cfg, trim(keyval.substr(0, eq)), trim(keyval.substr(eq + 1)));
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_assignment(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int exit_code_for(std::span<const lab::BoundCertificate> certs) {
    for (const auto& c : certs)
        if (!c.pass) return kExitCertificateFailure;
    return kExitOk;
}

std::vector<std::string> known_claims() {
    return {"Lemma1.12", "Lemma1.13", "Lemma3",        "Lemma4",        "Lemma5",
            "Lemma6",    "Lemma7",    "Lemma8",        "Thm1.10",       "Thm1.11",
            "Thm2.interior", "Thm2.endpoint", "Thm3", "all"};
}

int run(const RunConfig& cfg) {
    try {
        cfg.pv.validate();
        if (cfg.command == "catalog") return run_catalog(cfg);
        if (cfg.command == "apply") return run_apply(cfg);
        if (cfg.command == "limit-study") return run_limit_study(cfg);
        if (cfg.command == "certify") return run_certify(cfg);
        throw ConfigError("unknown command: " + cfg.command);
    } catch (const quad::NonLipschitzError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace sio::cli
