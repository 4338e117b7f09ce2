// Command-line front end: loads a JSON experiment config, runs the
// inference / simulation / converse / oracle-check workflows and writes
// machine-readable reports (JSON for single-shot results, CSV for per-N
// tables). Exit codes: 0 success, 2 config error, 3 inconsistent data,
// 4 oracle violation.
#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qjaynes/qjaynes.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInconsistent = 3;
constexpr int kExitOracle = 4;

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnsembleSpec {
    std::string method = "eigen";
    int members = 0;
    std::vector<double> family_params;
};

struct ExperimentConfig {
    qjaynes::ConstraintSet constraints;
    double delta = 0.05;
    std::vector<int> n_list{100, 1000};
    int samples = 1000;
    std::uint64_t seed = 0;
    EnsembleSpec ensemble;
    std::string output = "report";
};

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) ok = true;
        if (!ok) throw ConfigError("unknown field '" + path + item.key() + "'");
    }
}

const json& require_field(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing field '" + path + key + "'");
    return *it;
}

double number_field(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_number()) throw ConfigError("field '" + path + key + "' must be a number");
    return v.get<double>();
}

int integer_field(const json& v, const std::string& where, int lo, int hi) {
    if (!v.is_number_integer())
        throw ConfigError("field '" + where + "' must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError("field '" + where + "' out of range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return static_cast<int>(x);
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    reject_unknown(root, "",
                   {"constraints", "delta", "n_list", "samples", "seed", "ensemble", "output"});

    ExperimentConfig cfg;

    const json& cons = require_field(root, "", "constraints");
    if (!cons.is_array() || cons.empty() || cons.size() > 3)
        throw ConfigError("field 'constraints' must be an array of 1 to 3 entries");
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const std::string path = "constraints[" + std::to_string(i) + "].";
        const json& c = cons[i];
        if (!c.is_object()) throw ConfigError("field '" + path + "' must be an object");
        reject_unknown(c, path, {"matrix", "mean"});
        const json& m = require_field(c, path, "matrix");
        if (!m.is_object()) throw ConfigError("field '" + path + "matrix' must be an object");
        const std::string mpath = path + "matrix.";
        reject_unknown(m, mpath, {"h11", "h22", "re12", "im12"});
        qjaynes::Hermitian2 obs;
        obs.h11 = number_field(m, mpath, "h11");
        obs.h22 = number_field(m, mpath, "h22");
        obs.h12 = {number_field(m, mpath, "re12"), number_field(m, mpath, "im12")};
        cfg.constraints.constraints.push_back({obs, number_field(c, path, "mean")});
    }

    if (root.contains("delta")) {
        cfg.delta = number_field(root, "", "delta");
        if (!(cfg.delta > 0.0)) throw ConfigError("field 'delta' must be positive");
    }
    if (root.contains("n_list")) {
        const json& nl = root["n_list"];
        if (!nl.is_array() || nl.empty())
            throw ConfigError("field 'n_list' must be a nonempty array");
        cfg.n_list.clear();
        for (std::size_t i = 0; i < nl.size(); ++i)
            cfg.n_list.push_back(
                integer_field(nl[i], "n_list[" + std::to_string(i) + "]", 1, 10000000));
    }
    if (root.contains("samples"))
        cfg.samples = integer_field(root["samples"], "samples", 1, 100000000);
    if (root.contains("seed")) {
        const json& s = root["seed"];
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<long long>() < 0))
            throw ConfigError("field 'seed' must be a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("ensemble")) {
        const json& e = root["ensemble"];
        if (!e.is_object()) throw ConfigError("field 'ensemble' must be an object");
        reject_unknown(e, "ensemble.", {"method", "members", "family_params"});
        if (e.contains("method")) {
            if (!e["method"].is_string())
                throw ConfigError("field 'ensemble.method' must be a string");
            cfg.ensemble.method = e["method"].get<std::string>();
            if (cfg.ensemble.method != "eigen" && cfg.ensemble.method != "random-mix")
                throw ConfigError("field 'ensemble.method' must be 'eigen' or 'random-mix'");
        }
        if (e.contains("members")) {
            if (cfg.ensemble.method != "random-mix")
                throw ConfigError("field 'ensemble.members' is only valid for 'random-mix'");
            cfg.ensemble.members = integer_field(e["members"], "ensemble.members", 2, 10000);
        } else if (cfg.ensemble.method == "random-mix") {
            throw ConfigError("missing field 'ensemble.members' for 'random-mix'");
        }
        if (e.contains("family_params")) {
            const json& fp = e["family_params"];
            if (!fp.is_array() || fp.size() > 3)
                throw ConfigError("field 'ensemble.family_params' must be an array of <= 3 numbers");
            for (const auto& v : fp) {
                if (!v.is_number())
                    throw ConfigError("field 'ensemble.family_params' must hold numbers");
                cfg.ensemble.family_params.push_back(v.get<double>());
            }
        }
    }
    if (root.contains("output")) {
        if (!root["output"].is_string()) throw ConfigError("field 'output' must be a string");
        cfg.output = root["output"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Explicit formulas for one or two constraints, the general Bloch solver
/// otherwise (and for degenerate corner cases).
qjaynes::JaynesSolution solve(const qjaynes::ConstraintSet& cs) {
    const auto& c = cs.constraints;
    try {
        if (c.size() == 1)
            return qjaynes::infer_one(c[0].observable, c[0].mean, cs.tol_consistency);
        if (c.size() == 2)
            return qjaynes::infer_two(c[0].observable, c[0].mean, c[1].observable, c[1].mean,
                                      cs.tol_consistency);
    } catch (const qjaynes::Error& e) {
        if (e.code() != qjaynes::errc::degenerate_observable) throw;
    }
    return qjaynes::infer_general(cs);
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path + "'");
    out << contents;
}

int cmd_infer(const ExperimentConfig& cfg, const std::string& out_prefix) {
    const qjaynes::JaynesSolution sol = solve(cfg.constraints);
    json j;
    const qjaynes::Hermitian2 m = sol.rho_j.matrix();
    j["rho_j"]["matrix"] = {{"h11", m.h11},
                            {"h22", m.h22},
                            {"re12", m.h12.real()},
                            {"im12", m.h12.imag()}};
    j["rho_j"]["bloch"] = {{"rx", sol.rho_j.rx}, {"ry", sol.rho_j.ry}, {"rz", sol.rho_j.rz}};
    j["entropy_bits"] = sol.entropy_bits;
    j["entropy_nats"] = sol.entropy_bits * 0.69314718055994530941723212145818;
    j["eigenvalues"] = {{"hi", sol.frame.lambda_hi}, {"lo", sol.frame.lambda_lo}};
    j["family"]["kind"] = qjaynes::family_kind_name(sol.family.kind);
    j["family"]["extent"] = sol.family.extent;
    j["family"]["dims"] = sol.family.dims();
    json axes = json::array();
    for (int i = 0; i < sol.family.dims(); ++i)
        axes.push_back({sol.family.axes[i][0], sol.family.axes[i][1], sol.family.axes[i][2]});
    j["family"]["axes"] = axes;
    j["data_rank"] = sol.data_rank;

    const std::string path = out_prefix + ".json";
    write_file(path, j.dump(2) + "\n");
    std::cout << "inference report written to " << path << "\n";
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_prefix, int threads) {
    const qjaynes::JaynesSolution sol = solve(cfg.constraints);
    const qjaynes::QubitState source = qjaynes::family_state(sol, cfg.ensemble.family_params);
    const qjaynes::DecomposeMethod method = cfg.ensemble.method == "eigen"
                                                ? qjaynes::DecomposeMethod::eigen
                                                : qjaynes::DecomposeMethod::random_mix;
    const qjaynes::PureEnsemble ens =
        qjaynes::decompose_ensemble(source, method, cfg.ensemble.members, cfg.seed);
    const qjaynes::SimulationReport rep =
        qjaynes::simulate(sol, ens, cfg.n_list, cfg.delta, cfg.samples, cfg.seed, threads);

    std::string csv = "n,rate_bits,p_error,fidelity_mean,fidelity_stderr,fidelity_bound,seed\n";
    for (const auto& r : rep.records) {
        csv += std::to_string(r.n_copies) + "," + fmt17(r.rate_bits) + "," +
               fmt17(r.p_error_exact) + "," + fmt17(r.fidelity_mc_mean) + "," +
               fmt17(r.fidelity_mc_stderr) + "," + fmt17(r.fidelity_lower_bound) + "," +
               std::to_string(r.seed) + "\n";
    }
    const std::string path = out_prefix + ".csv";
    write_file(path, csv);
    std::cout << "simulation report (rates in qubits per message) written to " << path << "\n";
    return 0;
}

int cmd_converse(const ExperimentConfig& cfg, const std::string& out_prefix, double budget) {
    const qjaynes::JaynesSolution sol = solve(cfg.constraints);
    const qjaynes::ConverseReport rep = qjaynes::converse_check(sol, cfg.n_list, budget);
    std::string csv = "n,rank_log2,retained_trace\n";
    for (const auto& r : rep.records)
        csv += std::to_string(r.n_copies) + "," + fmt17(r.rank_budget_log2) + "," +
               fmt17(r.best_retained_trace) + "\n";
    const std::string path = out_prefix + ".csv";
    write_file(path, csv);
    std::cout << "converse report written to " << path << "\n";
    return 0;
}

int cmd_oracle_check(const ExperimentConfig& cfg, bool corrupt_window) {
    const qjaynes::JaynesSolution sol = solve(cfg.constraints);
    for (const int n : cfg.n_list)
        if (n > qjaynes::oracle::kMaxCopies)
            throw ConfigError("oracle-check n_list entries must be <= 10, got " +
                              std::to_string(n));
    bool all_pass = true;
    for (const int n : cfg.n_list) {
        const qjaynes::TypicalProjector good = qjaynes::build_projector(sol, n, cfg.delta);
        qjaynes::TypicalProjector fast = good;
        if (corrupt_window) {
            fast.k_lo = std::min(fast.k_lo + 1, n);
            fast.k_hi = std::min(fast.k_hi + 1, n);
        }
        const qjaynes::oracle::CompareReport rep =
            qjaynes::oracle::oracle_compare(sol, fast, good, cfg.samples, cfg.seed);
        const bool pass = rep.pass();
        all_pass = all_pass && pass;
        std::printf(
            "n=%d trace_dev=%.3e overlap_dev=%.3e flag_dev=%.3e identity_dev=%.3e %s\n", n,
            rep.max_trace_dev, rep.max_overlap_dev, rep.max_flag_dev, rep.max_eq_identity_dev,
            pass ? "PASS" : "FAIL");
    }
    if (!all_pass) {
        std::cerr << "oracle violation: fast path deviates from the dense reference\n";
        return kExitOracle;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-entropy qubit state reconstruction and typical-subspace "
                 "compression simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_prefix;
    std::uint64_t seed_override = 0;
    int threads = 0;
    double budget = 0.0;
    bool corrupt_window = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_prefix, "output path prefix (overrides config)");
        sub->add_option("--seed", seed_override, "seed override");
        sub->add_option("--threads", threads, "worker threads, 0 = auto");
    };

    CLI::App* infer = app.add_subcommand("infer", "reconstruct the max-entropy state");
    add_common(infer);
    CLI::App* simulate = app.add_subcommand("simulate", "run the compression protocol");
    add_common(simulate);
    CLI::App* converse =
        app.add_subcommand("converse", "retained trace under a rank budget");
    add_common(converse);
    converse->add_option("--budget", budget, "rate budget in qubits per message, in (0, 1]")
        ->required();
    CLI::App* oracle_check =
        app.add_subcommand("oracle-check", "compare fast paths against the dense oracle");
    add_common(oracle_check);
    oracle_check
        ->add_flag("--corrupt-window", corrupt_window,
                   "validation hook: shift the fast window by one weight class")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (app.get_subcommands().front()->count("--seed") > 0) cfg.seed = seed_override;
        const std::string prefix = out_prefix.empty() ? cfg.output : out_prefix;

        if (*infer) return cmd_infer(cfg, prefix);
        if (*simulate) return cmd_simulate(cfg, prefix, threads);
        if (*converse) return cmd_converse(cfg, prefix, budget);
        if (*oracle_check) return cmd_oracle_check(cfg, corrupt_window);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qjaynes::Error& e) {
        const qjaynes::errc c = e.code();
        if (c == qjaynes::errc::inconsistent_data || c == qjaynes::errc::inconsistent_ensemble) {
            std::cerr << "inconsistent data: " << e.what() << "\n";
            return kExitInconsistent;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
