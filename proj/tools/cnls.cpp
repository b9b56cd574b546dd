#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cnls/acceptance.hpp"
#include "cnls/birkhoff.hpp"
#include "cnls/dynamics.hpp"
#include "cnls/effective.hpp"
#include "cnls/errors.hpp"
#include "cnls/nonres.hpp"
#include "cnls/random.hpp"

using namespace cnls;
using nlohmann::json;

namespace {

constexpr const char* kPrng = "mt19937_64";

const std::vector<std::string> kSubcommands = {"simulate",    "birkhoff-verify", "effective",
                                               "nonres-scan", "nonres-measure",  "instability",
                                               "stability",   "beating",         "acceptance"};

/// Write to `path` through a temporary file in the same directory; "-" or empty writes to stdout.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open output file", {{"path", path}});
        os << content;
        os.flush();
        if (!os) throw Error("IOError", "failed writing output file", {{"path", path}});
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(std::string("cannot read ") + what, {{"path", path}});
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Flat key=value file; '#' starts a comment, underscores in keys map to dashes.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::istringstream is(read_file(path, "config file"));
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line is not key=value", {{"path", path}, {"line", lineno}});
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        for (char& c : key)
            if (c == '_') c = '-';
        if (key.empty()) throw ConfigError("empty config key", {{"path", path}, {"line", lineno}});
        out.emplace_back(key, value);
    }
    return out;
}

/// Config entries are spliced in right after the subcommand so that later command-line flags win.
std::vector<std::string> expand_config(int argc, char** argv, std::string& path) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config requires a path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return rest;
    std::vector<std::string> file_args;
    for (const auto& [k, v] : read_config(path)) file_args.push_back("--" + k + "=" + v);
    auto pos = rest.begin();
    while (pos != rest.end() && std::find(kSubcommands.begin(), kSubcommands.end(), *pos) == kSubcommands.end()) ++pos;
    if (pos != rest.end()) ++pos;
    rest.insert(pos, file_args.begin(), file_args.end());
    return rest;
}

json typed(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    if (!s.empty()) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end && *end == '\0') {
            const long long iv = static_cast<long long>(v);
            if (static_cast<double>(iv) == v && s.find_first_of(".eE") == std::string::npos) return iv;
            return v;
        }
    }
    return s;
}

/// Every option of the subcommand and the global ones, with defaults filled in.
json resolved_config(const CLI::App& app, const CLI::App& sub) {
    json cfg = {{"subcommand", sub.get_name()}};
    auto add = [&](const CLI::App& a) {
        for (const CLI::Option* o : a.get_options()) {
            if (o->get_lnames().empty()) continue;
            const std::string name = o->get_lnames().front();
            if (name == "help") continue;
            std::string v;
            if (o->count() > 0 && !o->results().empty())
                v = o->results().back();
            else
                v = o->get_default_str();
            if (o->get_type_size() == 0 && v.empty()) v = o->count() > 0 ? "true" : "false";
            if (o->get_type_name() == "BOOLEAN" && (v == "1" || v == "0")) v = v == "1" ? "true" : "false";
            cfg[name] = typed(v);
        }
    };
    add(app);
    add(sub);
    return cfg;
}

std::vector<double> parse_list(const std::string& s, const char* name) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (!end || *end != '\0') throw ConfigError(std::string("malformed number in --") + name, {{"value", item}});
        out.push_back(v);
    }
    return out;
}

struct TorusArgs {
    TorusParams tp{1, 2, 1.0, 1.0, 0.01};
    void add(CLI::App* s) {
        s->add_option("--p", tp.p, "first excited mode")->capture_default_str();
        s->add_option("--q", tp.q, "second excited mode")->capture_default_str();
        s->add_option("--rho1", tp.rho1, "normalized action of a_p")->capture_default_str();
        s->add_option("--rho2", tp.rho2, "normalized action of b_q")->capture_default_str();
        s->add_option("--nu", tp.nu, "torus size")->capture_default_str();
    }
};

void check_truncation(int J, const TorusParams& tp) {
    if (J < std::max(std::abs(tp.p), std::abs(tp.q)))
        throw ConfigError("truncation radius J must cover the excited modes", {{"J", J}, {"p", tp.p}, {"q", tp.q}});
}

/// Resolves --case against p, q: stable forces q = p.
void apply_case(const std::string& c, TorusParams& tp, const CLI::App* s) {
    if (c == "stable") {
        if (s->count("--q") == 0) tp.q = tp.p;
        if (tp.q != tp.p) throw ConfigError("stable case requires p = q", {{"p", tp.p}, {"q", tp.q}});
    } else if (c == "unstable") {
        if (tp.p == tp.q) throw ConfigError("unstable case requires p != q", {{"p", tp.p}, {"q", tp.q}});
    } else {
        throw ConfigError("case must be unstable or stable", {{"case", c}});
    }
}

json envelope(const json& cfg) { return {{"config", cfg}, {"prng", {{"name", kPrng}, {"seed", cfg.value("seed", json())}}}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-species cubic NLS on the circle: normal forms, effective models and dynamics", "cnls"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();

    int threads = 1;
    app.add_option("--threads", threads, "worker threads for sweep jobs")->capture_default_str();
    app.add_option("--config", "flat key=value config file; flags override it");

    std::uint64_t seed = 20240607;
    std::string out, csv;

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate the truncated system with Strang splitting");
    TorusArgs sim_t;
    sim_t.add(sim);
    std::string sim_init = "two-mode", sim_state, sim_r5;
    IntegrateOptions sim_o;
    sim_o.T = 10.0;
    int sim_J = 16;
    double sim_gamma = 0.25, sim_eps2 = 1e-3, sim_norm = 1e-2, sim_s = 1.0;
    sim->add_option("--init", sim_init, "two-mode | beating | random | file")->capture_default_str();
    sim->add_option("--state", sim_state, "initial state JSON (init=file)");
    sim->add_option("--r5", sim_r5, "higher-order perturbation in the poly line format");
    sim->add_option("--J", sim_J, "truncation radius")->capture_default_str();
    sim->add_option("--dt", sim_o.dt, "time step")->capture_default_str();
    sim->add_option("--T", sim_o.T, "final time")->capture_default_str();
    sim->add_option("--stride", sim_o.stride, "record every n steps")->capture_default_str();
    sim->add_option("--tol-H", sim_o.tol_H, "energy drift tolerance")->capture_default_str();
    sim->add_option("--tol-L", sim_o.tol_L, "mass and momentum drift tolerance")->capture_default_str();
    sim->add_option("--enforce-drift", sim_o.enforce_drift, "fail when a drift tolerance is exceeded")->capture_default_str();
    sim->add_option("--gate", sim_o.gate, "smallness gate on the initial norm (<= 0 disables)")->capture_default_str();
    sim->add_option("--gamma", sim_gamma, "beating mixing fraction (init=beating)")->capture_default_str();
    sim->add_option("--eps2", sim_eps2, "beating total action (init=beating)")->capture_default_str();
    sim->add_option("--norm", sim_norm, "initial l2_s norm (init=random)")->capture_default_str();
    sim->add_option("--s", sim_s, "Sobolev index of the norm (init=random)")->capture_default_str();
    sim->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    sim->add_option("--csv", csv, "trajectory CSV path");
    sim->add_option("--out", out, "summary JSON path (default stdout)");

    // birkhoff-verify
    auto* bv = app.add_subcommand("birkhoff-verify", "exact check of the homological and resonance identities");
    int bv_J = 2;
    std::string bv_chi, bv_z4;
    bv->add_option("--J", bv_J, "truncation radius")->capture_default_str();
    bv->add_option("--export-chi4", bv_chi, "write chi4 in the poly line format");
    bv->add_option("--export-z4", bv_z4, "write Z4 in the poly line format");
    bv->add_option("--out", out, "report JSON path (default stdout)");

    // effective
    auto* eff = app.add_subcommand("effective", "effective quadratic model at a two-mode torus");
    TorusArgs eff_t;
    eff_t.add(eff);
    int eff_labels = 0, eff_J = 4, eff_samples = 16, eff_substeps = 128;
    bool eff_truth = false;
    double eff_mu = 0.3;
    std::string eff_nus = "0.001,0.003,0.01";
    eff->add_option("--labels", eff_labels, "list elliptic labels with |j| <= labels")->capture_default_str();
    eff->add_flag("--truth", eff_truth, "compare against the full Hamiltonian")->capture_default_str();
    eff->add_option("--J", eff_J, "truncation radius for the comparison")->capture_default_str();
    eff->add_option("--samples", eff_samples, "polydisc samples per nu")->capture_default_str();
    eff->add_option("--mu", eff_mu, "polydisc radius")->capture_default_str();
    eff->add_option("--nus", eff_nus, "comma-separated nu values for the comparison")->capture_default_str();
    eff->add_option("--substeps", eff_substeps, "RK4 substeps of the normal-form flow")->capture_default_str();
    eff->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    eff->add_option("--out", out, "model JSON path (default stdout)");

    // nonres-scan
    auto* ns = app.add_subcommand("nonres-scan", "enumerate small divisors and classify them");
    TorusArgs ns_t;
    ns_t.add(ns);
    std::string ns_case = "unstable";
    ScanOptions ns_o;
    ns->add_option("--case", ns_case, "unstable | stable")->capture_default_str();
    ns->add_option("--J", ns_o.J, "elliptic index cutoff")->capture_default_str();
    ns->add_option("--N", ns_o.N, "cutoff |k| <= N")->capture_default_str();
    ns->add_option("--delta", ns_o.delta, "margin (<= 0 selects nu/2)")->capture_default_str();
    ns->add_option("--keep-excluded", ns_o.keep_excluded, "emit records removed by conservation laws")->capture_default_str();
    ns->add_option("--strict", ns_o.strict, "fail on a violation")->capture_default_str();
    ns->add_option("--out", out, "JSON-lines path (default stdout)");

    // nonres-measure
    auto* nm = app.add_subcommand("nonres-measure", "Monte-Carlo measure of the excluded parameter set");
    TorusArgs nm_t;
    nm_t.add(nm);
    std::string nm_case = "unstable", nm_kappa;
    MeasureOptions nm_o;
    nm->add_option("--case", nm_case, "unstable | stable")->capture_default_str();
    nm->add_option("--kappa", nm_kappa, "comma-separated kappa values (default delta/4, delta/2, delta)");
    nm->add_option("--N", nm_o.N, "cutoff |k| <= N")->capture_default_str();
    nm->add_option("--M", nm_o.M, "momentum constant (<= 0 selects |(p,q)|)")->capture_default_str();
    nm->add_option("--samples", nm_o.samples, "rho samples")->capture_default_str();
    nm->add_option("--J", nm_o.J, "elliptic index cutoff")->capture_default_str();
    nm->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    nm->add_option("--out", out, "report JSON path (default stdout)");

    // instability / stability
    auto add_linear = [&](CLI::App* s, TorusArgs& t, LinearizedOptions& o) {
        t.add(s);
        s->add_option("--J", o.J, "truncation radius")->capture_default_str();
        s->add_option("--T", o.T, "horizon (<= 0 selects the default)")->capture_default_str();
        s->add_option("--samples", o.samples, "output samples")->capture_default_str();
        s->add_option("--amplitude", o.amplitude, "seed amplitude (<= 0 selects 1e-8 sqrt(nu))")->capture_default_str();
        s->add_option("--require-growth", o.require_growth, "fail when no growth window is found")->capture_default_str();
        s->add_option("--seed", seed, "PRNG seed")->capture_default_str();
        s->add_option("--csv", csv, "time series CSV path");
        s->add_option("--out", out, "fit JSON path (default stdout)");
    };
    auto* ins = app.add_subcommand("instability", "growth rate of the linearized flow at an unstable torus");
    TorusArgs ins_t;
    LinearizedOptions ins_o;
    add_linear(ins, ins_t, ins_o);
    auto* sta = app.add_subcommand("stability", "boundedness of the linearized flow at a stable torus");
    TorusArgs sta_t;
    LinearizedOptions sta_o;
    add_linear(sta, sta_t, sta_o);

    // beating
    auto* bt = app.add_subcommand("beating", "energy exchange between resonant modes");
    BeatingOptions bt_o;
    bt->add_option("--gamma", bt_o.gamma, "mixing fraction")->capture_default_str();
    bt->add_option("--eps2", bt_o.eps2, "total action")->capture_default_str();
    bt->add_option("--p", bt_o.p, "first mode")->capture_default_str();
    bt->add_option("--q", bt_o.q, "second mode")->capture_default_str();
    bt->add_option("--J", bt_o.J, "truncation radius")->capture_default_str();
    bt->add_option("--dt", bt_o.dt, "time step")->capture_default_str();
    bt->add_option("--T-max", bt_o.T_max, "horizon cap (<= 0 selects 20/eps2)")->capture_default_str();
    bt->add_option("--stride", bt_o.stride, "record every n steps")->capture_default_str();
    bt->add_option("--tol-H", bt_o.tol_H, "energy drift tolerance")->capture_default_str();
    bt->add_option("--tol-L", bt_o.tol_L, "mass and momentum drift tolerance")->capture_default_str();
    bt->add_option("--csv", csv, "trajectory CSV path");
    bt->add_option("--out", out, "report JSON path (default stdout)");

    // acceptance
    auto* acc = app.add_subcommand("acceptance", "run the acceptance suite and print a pass/fail table");
    std::string acc_only;
    acc->add_option("--only", acc_only, "comma-separated criterion ids");
    acc->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    acc->add_option("--out", out, "results JSON path");

    CLI::App* sub = nullptr;
    std::string config_path;
    try {
        std::vector<std::string> args = expand_config(argc, argv, config_path);
        std::reverse(args.begin(), args.end());
        app.parse(args);
        for (CLI::App* s : app.get_subcommands()) sub = s;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const Error& e) {
        std::cerr << dump(e.to_json());
        return 2;
    }

    json cfg = resolved_config(app, *sub);
    cfg["config"] = config_path;
    try {
        if (threads < 1) throw ConfigError("threads must be positive", {{"threads", threads}});

        if (sub == sim) {
            TorusParams tp = sim_t.tp;
            check_truncation(sim_J, tp);
            FourierState z0;
            if (sim_init == "two-mode") {
                if (tp.p == tp.q) throw ConfigError("two-mode init requires p != q", {{"p", tp.p}});
                tp.validate();
                z0 = two_mode_state(tp, sim_J);
            } else if (sim_init == "beating") {
                z0 = beating_state(tp.p, tp.q, sim_J, sim_gamma, sim_eps2);
            } else if (sim_init == "random") {
                if (sim_norm <= 0) throw ConfigError("norm must be positive", {{"norm", sim_norm}});
                Rng rng(seed);
                z0 = random_state(rng, sim_J, sim_norm, sim_s);
            } else if (sim_init == "file") {
                if (sim_state.empty()) throw ConfigError("init=file requires --state");
                try {
                    z0 = state_from_json(json::parse(read_file(sim_state, "state file")));
                } catch (const json::exception& e) {
                    throw ConfigError("malformed state file", {{"path", sim_state}, {"reason", e.what()}});
                }
            } else {
                throw ConfigError("init must be two-mode, beating, random or file", {{"init", sim_init}});
            }
            if (sim_o.dt <= 0 || sim_o.T <= 0 || sim_o.stride < 1)
                throw ConfigError("dt, T and stride must be positive", {{"dt", sim_o.dt}, {"T", sim_o.T}});
            PolyHamiltonian r5;
            CompiledPoly r5c;
            if (!sim_r5.empty()) {
                r5 = user_R5(read_file(sim_r5, "perturbation file"), z0.J(),
                             tp.p == tp.q ? TorusCase::stable : TorusCase::unstable);
                r5c = CompiledPoly(r5, z0.J());
                sim_o.extra = &r5c;
            }
            const Trajectory tr = integrate(z0, sim_o);
            if (!csv.empty()) {
                std::ostringstream os;
                tr.write_csv(os, tp.p, tp.q);
                write_output(csv, os.str());
            }
            json j = envelope(cfg);
            j["trajectory"] = tr.summary_json();
            j["final_state"] = to_json(tr.states.back());
            write_output(out, dump(j));
        } else if (sub == bv) {
            if (bv_J < 0) throw ConfigError("J must be non-negative", {{"J", bv_J}});
            const HomologicalSolution sol = solve_homological(bv_J);
            const IdentityReport rep = verify_identities(sol, false);
            if (!bv_chi.empty()) write_output(bv_chi, sol.chi4.to_lines());
            if (!bv_z4.empty()) write_output(bv_z4, sol.z4.to_lines());
            json j = envelope(cfg);
            j["report"] = rep.to_json();
            j["monomials"] = {{"chi4", sol.chi4.size()}, {"z4", sol.z4.size()}};
            write_output(out, dump(j));
            if (!rep.ok()) throw ResidualNonzero("identity residual is nonzero", rep.to_json());
        } else if (sub == eff) {
            const TorusParams& tp = eff_t.tp;
            tp.validate();
            const EffectiveModel m = build_model(tp);
            json j = envelope(cfg);
            j["model"] = m.to_json(eff_labels);
            j["omega"] = m.omega;
            if (eff_truth) {
                check_truncation(eff_J, tp);
                EffectiveVsTruthOptions o;
                o.nus = parse_list(eff_nus, "nus");
                o.samples = eff_samples;
                o.seed = seed;
                o.mu = eff_mu;
                o.substeps = eff_substeps;
                j["truth"] = effective_vs_truth(tp, eff_J, o).to_json();
            }
            write_output(out, dump(j));
        } else if (sub == ns) {
            TorusParams tp = ns_t.tp;
            apply_case(ns_case, tp, ns);
            cfg["q"] = tp.q;
            tp.validate();
            check_truncation(ns_o.J, tp);
            if (ns_o.N < 0) throw ConfigError("N must be non-negative", {{"N", ns_o.N}});
            const ScanResult res = scan_divisors(tp, ns_o);
            const HypothesisReport hyp = check_A0_A1(build_model(tp), ns_o.J, res.delta);
            std::string text;
            json head = envelope(cfg);
            head["summary"] = res.summary_json();
            head["hypotheses"] = hyp.to_json();
            text += head.dump() + "\n";
            for (const auto& r : res.records) text += r.to_json().dump() + "\n";
            write_output(out, text);
        } else if (sub == nm) {
            TorusParams tp = nm_t.tp;
            apply_case(nm_case, tp, nm);
            cfg["q"] = tp.q;
            tp.validate();
            check_truncation(nm_o.J, tp);
            if (nm_o.samples < 1) throw ConfigError("samples must be positive", {{"samples", nm_o.samples}});
            const double delta = tp.nu / 2;
            nm_o.kappas = nm_kappa.empty() ? std::vector<double>{delta / 4, delta / 2, delta} : parse_list(nm_kappa, "kappa");
            for (double k : nm_o.kappas)
                if (!(k > 0 && k <= delta)) throw ConfigError("kappa must lie in (0, nu/2]", {{"kappa", k}, {"delta", delta}});
            nm_o.seed = seed;
            cfg["kappa"] = nm_o.kappas;
            const MeasureSweep sw = measure_estimate(tp, nm_o);
            json j = envelope(cfg);
            j["sweep"] = sw.to_json();
            write_output(out, dump(j));
        } else if (sub == ins || sub == sta) {
            const bool stable = sub == sta;
            TorusParams tp = stable ? sta_t.tp : ins_t.tp;
            LinearizedOptions o = stable ? sta_o : ins_o;
            apply_case(stable ? "stable" : "unstable", tp, sub);
            cfg["q"] = tp.q;
            tp.validate();
            check_truncation(o.J, tp);
            if (o.samples < 2) throw ConfigError("samples must be at least 2", {{"samples", o.samples}});
            o.seed = seed;
            const GrowthFit fit = linearized_flow(tp, o);
            if (!csv.empty()) {
                std::ostringstream os;
                os << "t,norm\n";
                char buf[64];
                for (std::size_t i = 0; i < fit.times.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", fit.times[i], fit.block_norms[i]);
                    os << buf;
                }
                write_output(csv, os.str());
            }
            json j = envelope(cfg);
            j["fit"] = fit.to_json();
            write_output(out, dump(j));
        } else if (sub == bt) {
            const BeatingReport rep = beating(bt_o);
            if (!csv.empty()) {
                std::ostringstream os;
                rep.traj.write_csv(os, bt_o.p, bt_o.q);
                write_output(csv, os.str());
            }
            json j = envelope(cfg);
            j["report"] = rep.to_json();
            write_output(out, dump(j));
        } else if (sub == acc) {
            AcceptanceOptions o;
            o.seed = seed;
            o.threads = threads;
            for (double v : parse_list(acc_only, "only")) {
                if (v != int(v) || v < 1 || v > 11) throw ConfigError("criterion ids are 1..11", {{"id", v}});
                o.only.push_back(int(v));
            }
            const auto results = run_acceptance(o, [](const CriterionResult& r) {
                std::cout << r.line() << std::endl;
            });
            int passed = 0;
            json arr = json::array();
            for (const auto& r : results) {
                passed += r.pass;
                arr.push_back(r.to_json());
            }
            std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
            if (!out.empty()) {
                json j = envelope(cfg);
                j["results"] = arr;
                write_output(out, dump(j));
            }
            return passed == int(results.size()) ? 0 : 1;
        }
    } catch (const Error& e) {
        const bool gate = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SmallnessGate*>(&e) ||
                          dynamic_cast<const DegenerateModes*>(&e) || dynamic_cast<const ParseError*>(&e) ||
                          dynamic_cast<const DegreeTooLow*>(&e) || dynamic_cast<const NonZeroMomentum*>(&e) ||
                          dynamic_cast<const MassBracketNonzero*>(&e);
        json j = envelope(cfg);
        j.update(e.to_json());
        std::cerr << dump(j);
        return gate ? 2 : 1;
    } catch (const std::invalid_argument& e) {
        json j = envelope(cfg);
        j.update(json{{"error", "ConfigError"}, {"message", e.what()}});
        std::cerr << dump(j);
        return 2;
    } catch (const std::exception& e) {
        json j = envelope(cfg);
        j.update(json{{"error", "RuntimeError"}, {"message", e.what()}});
        std::cerr << dump(j);
        return 1;
    }
    return 0;
}
