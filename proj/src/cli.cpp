#include "sis/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sis/sde.hpp"
#include "sis/verify.hpp"

namespace sis {

namespace {

Scheme parse_scheme(const std::string& name) {
    if (name == "em-state") return Scheme::EulerMaruyamaState;
    if (name == "em-log") return Scheme::EulerMaruyamaLog;
    if (name == "milstein") return Scheme::Milstein;
    throw std::invalid_argument("unknown scheme: " + name);
}

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

// "lo:hi:count" with count >= 1; count == 1 collapses to {lo}.
GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    std::istringstream is(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(is, part, ':')) parts.push_back(part);
    if (parts.size() != 3)
        throw std::invalid_argument("grid must be lo:hi:count, got '" + text + "'");
    std::size_t used = 0;
    g.lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("bad grid lo: " + parts[0]);
    g.hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("bad grid hi: " + parts[1]);
    g.count = std::stoi(parts[2], &used);
    if (used != parts[2].size() || g.count < 1)
        throw std::invalid_argument("bad grid count: " + parts[2]);
    if (!(std::isfinite(g.lo) && std::isfinite(g.hi)))
        throw std::invalid_argument("grid endpoints must be finite");
    return g;
}

std::vector<double> grid_values(const GridSpec& g) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(g.count));
    if (g.count == 1) {
        v.push_back(g.lo);
        return v;
    }
    for (int k = 0; k < g.count; ++k)
        v.push_back(g.lo + (g.hi - g.lo) * static_cast<double>(k)
                             / static_cast<double>(g.count - 1));
    return v;
}

// Finds the last --config value anywhere in argv so the file can seed the
// defaults before CLI11 binds the flags over them.
std::string scan_config_path(int argc, const char* const* argv) {
    std::string path;
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--config" && k + 1 < argc)
            path = argv[k + 1];
        else if (arg.rfind("--config=", 0) == 0)
            path = arg.substr(9);
    }
    return path;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
    if (text.empty()) throw std::invalid_argument(std::string(what) + ": empty value");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end == nullptr || *end != '\0')
        throw std::invalid_argument(std::string(what) + ": bad integer '" + text + "'");
    return v;
}

double json_number(const nlohmann::json& j, const char* what) {
    if (!j.is_number())
        throw std::invalid_argument(std::string("config: ") + what + " must be a number");
    return j.get<double>();
}

bool all_verdicts_pass(const std::vector<Verdict>& vs) {
    for (const Verdict& v : vs)
        if (!v.pass) return false;
    return true;
}

int do_classify(const RunConfig& cfg, std::ostream& os) {
    emit_regime(classify(cfg.model), cfg.output, os);
    return 0;
}

int do_simulate(const RunConfig& cfg, std::uint32_t path_index, std::ostream& os) {
    const PathRecord rec =
        simulate_path(cfg.model, cfg.scheme, cfg.ensemble.base_seed, path_index);
    emit_path(rec, cfg.output, os);
    return 0;
}

int do_ensemble(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    if (!cfg.dump_paths) {
        emit_report(run_ensemble(cfg.model, cfg.scheme, cfg.ensemble), cfg.output, os);
        return 0;
    }
    if (cfg.out_path == "-") {
        err << "error: --dump-paths requires --out FILE\n";
        return 1;
    }
    const std::string paths_name = cfg.out_path + ".paths.csv";
    std::ofstream paths(paths_name);
    if (!paths) {
        err << "error: cannot open " << paths_name << "\n";
        return 3;
    }
    // Sequential run so the series can stream out while summaries collect;
    // draws are counter-based, so the report matches the threaded one.
    const RegimeReport regime = classify(cfg.model);
    paths << "path_index,t,i,log_i,sum_i,sum_i2,mart_state,mart_log\n";
    std::vector<PathSummary> summaries;
    summaries.reserve(cfg.ensemble.n_paths);
    for (std::uint32_t j = 0; j < cfg.ensemble.n_paths; ++j) {
        const PathRecord rec =
            simulate_path(cfg.model, cfg.scheme, cfg.ensemble.base_seed, j);
        for (const Sample& s : rec.samples) {
            paths << j << "," << format_double(s.t) << "," << format_double(s.i)
                  << "," << format_double(s.log_i) << "," << format_double(s.sum_i)
                  << "," << format_double(s.sum_i2) << ","
                  << format_double(s.mart_state) << "," << format_double(s.mart_log)
                  << "\n";
        }
        summaries.push_back(summarize(rec, cfg.model));
    }
    paths.flush();
    if (!paths) {
        err << "error: write failed: " << paths_name << "\n";
        return 3;
    }
    EnsembleReport rep = aggregate(std::move(summaries));
    rep.regime = regime;
    rep.scheme = cfg.scheme.scheme;
    emit_report(rep, cfg.output, os);
    return 0;
}

int do_verify(const RunConfig& cfg, double tol_theorem, double tol_lemma,
              double tol_identity, std::ostream& os) {
    const EnsembleReport rep = run_ensemble(cfg.model, cfg.scheme, cfg.ensemble);
    std::vector<Verdict> verdicts;
    if (rep.regime.r0s < 1.0)
        verdicts.push_back(check_theorem(cfg.model, rep, tol_theorem));
    verdicts.push_back(check_lemma(cfg.model, rep, tol_lemma));
    if (cfg.scheme.scheme == Scheme::EulerMaruyamaState)
        verdicts.push_back(check_identity(rep, tol_identity));
    verdicts.push_back(check_martingale(rep));
    verdicts.push_back(check_hoelder(cfg.model, rep));
    emit_verdicts(verdicts, cfg.output, os);
    return all_verdicts_pass(verdicts) ? 0 : 2;
}

int do_sweep(const RunConfig& cfg, const std::optional<GridSpec>& beta_grid,
             const std::optional<GridSpec>& sigma2_grid, std::ostream& os) {
    std::vector<double> betas = beta_grid ? grid_values(*beta_grid)
                                          : std::vector<double>{cfg.model.beta};
    std::vector<double> sigma2s =
        sigma2_grid ? grid_values(*sigma2_grid)
                    : std::vector<double>{cfg.model.sigma * cfg.model.sigma};
    for (double b : betas)
        if (!(b > 0.0)) throw std::invalid_argument("sweep: beta grid must be > 0");
    for (double s2 : sigma2s)
        if (!(s2 >= 0.0)) throw std::invalid_argument("sweep: sigma2 grid must be >= 0");

    const bool json = cfg.output == OutputFormat::Json;
    if (json)
        os << "[";
    else
        os << "beta,sigma2,r0s,theorem_case,rate_bound,average_bound,"
              "extinct_fraction,slope_mean,slope_stderr,slope_q05,slope_q25,"
              "slope_q50,slope_q75,slope_q95,avg_i_mean,mart_mean,mart_stderr,"
              "max_identity_residual\n";
    bool first = true;
    for (double s2 : sigma2s) {
        for (double b : betas) {
            ModelParams p = cfg.model;
            p.beta = b;
            p.sigma = std::sqrt(s2);
            const EnsembleReport rep = run_ensemble(p, cfg.scheme, cfg.ensemble);
            const RegimeReport& r = rep.regime;
            if (json) {
                os << (first ? "" : ",") << "{\"beta\":" << format_double(b)
                   << ",\"sigma2\":" << format_double(s2)
                   << ",\"r0s\":" << format_double(r.r0s) << ",\"theorem_case\":\""
                   << to_string(r.theorem_case) << "\""
                   << ",\"rate_bound\":" << format_double(r.rate_bound)
                   << ",\"average_bound\":" << format_double(r.average_bound)
                   << ",\"extinct_fraction\":" << format_double(rep.extinct_fraction)
                   << ",\"slope_mean\":" << format_double(rep.slope_mean)
                   << ",\"slope_stderr\":" << format_double(rep.slope_stderr)
                   << ",\"slope_quantiles\":[";
                for (int k = 0; k < 5; ++k)
                    os << (k ? "," : "") << format_double(rep.slope_quantiles[k]);
                os << "],\"avg_i_mean\":" << format_double(rep.avg_i_mean)
                   << ",\"mart_mean\":" << format_double(rep.mart_mean)
                   << ",\"mart_stderr\":" << format_double(rep.mart_stderr)
                   << ",\"max_identity_residual\":"
                   << format_double(rep.max_identity_residual) << "}";
            } else {
                os << format_double(b) << "," << format_double(s2) << ","
                   << format_double(r.r0s) << "," << to_string(r.theorem_case) << ","
                   << format_double(r.rate_bound) << ","
                   << format_double(r.average_bound) << ","
                   << format_double(rep.extinct_fraction) << ","
                   << format_double(rep.slope_mean) << ","
                   << format_double(rep.slope_stderr);
                for (int k = 0; k < 5; ++k)
                    os << "," << format_double(rep.slope_quantiles[k]);
                os << "," << format_double(rep.avg_i_mean) << ","
                   << format_double(rep.mart_mean) << ","
                   << format_double(rep.mart_stderr) << ","
                   << format_double(rep.max_identity_residual) << "\n";
            }
            first = false;
        }
    }
    if (json) os << "]\n";
    return 0;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    in >> j;

    RunConfig cfg;
    if (j.contains("model")) {
        const nlohmann::json& m = j.at("model");
        if (m.contains("sigma") && m.contains("sigma2"))
            throw std::invalid_argument("config: give sigma or sigma2, not both");
        if (m.contains("beta")) cfg.model.beta = json_number(m["beta"], "model.beta");
        if (m.contains("gamma")) cfg.model.gamma = json_number(m["gamma"], "model.gamma");
        if (m.contains("mu")) cfg.model.mu = json_number(m["mu"], "model.mu");
        if (m.contains("sigma")) cfg.model.sigma = json_number(m["sigma"], "model.sigma");
        if (m.contains("sigma2")) {
            const double s2 = json_number(m["sigma2"], "model.sigma2");
            if (!(s2 >= 0.0))
                throw std::invalid_argument("config: model.sigma2 must be >= 0");
            cfg.model.sigma = std::sqrt(s2);
        }
        if (m.contains("capacity"))
            cfg.model.capacity = json_number(m["capacity"], "model.capacity");
        if (m.contains("i0")) cfg.model.i0 = json_number(m["i0"], "model.i0");
    }
    if (j.contains("scheme")) {
        const nlohmann::json& s = j.at("scheme");
        if (s.contains("scheme")) cfg.scheme.scheme = parse_scheme(s["scheme"].get<std::string>());
        if (s.contains("dt")) cfg.scheme.dt = json_number(s["dt"], "scheme.dt");
        if (s.contains("t_end")) cfg.scheme.t_end = json_number(s["t_end"], "scheme.t_end");
        if (s.contains("clamp_eps"))
            cfg.scheme.clamp_eps = json_number(s["clamp_eps"], "scheme.clamp_eps");
        if (s.contains("extinction_eps"))
            cfg.scheme.extinction_eps =
                json_number(s["extinction_eps"], "scheme.extinction_eps");
        if (s.contains("record_stride"))
            cfg.scheme.record_stride = s["record_stride"].get<std::uint64_t>();
    }
    if (j.contains("ensemble")) {
        const nlohmann::json& e = j.at("ensemble");
        if (e.contains("n_paths")) cfg.ensemble.n_paths = e["n_paths"].get<std::uint32_t>();
        if (e.contains("base_seed"))
            cfg.ensemble.base_seed = e["base_seed"].get<std::uint64_t>();
        if (e.contains("max_workers"))
            cfg.ensemble.max_workers = e["max_workers"].get<std::uint32_t>();
    }
    if (j.contains("output")) {
        const std::string f = j.at("output").get<std::string>();
        if (f == "csv")
            cfg.output = OutputFormat::Csv;
        else if (f == "json")
            cfg.output = OutputFormat::Json;
        else
            throw std::invalid_argument("config: output must be csv or json");
    }
    if (j.contains("out_path")) cfg.out_path = j.at("out_path").get<std::string>();
    if (j.contains("dump_paths")) cfg.dump_paths = j.at("dump_paths").get<bool>();
    return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        const std::string config_path = scan_config_path(argc, argv);
        if (!config_path.empty()) cfg = load_run_config(config_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"SIS epidemic SDE simulator and verification harness"};
    app.name("sis");
    app.require_subcommand(1);

    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    std::string scheme_name = to_string(cfg.scheme.scheme);
    std::string format_name = cfg.output == OutputFormat::Json ? "json" : "csv";
    std::string config_path_arg;
    std::uint32_t path_index = 0;
    double tol_theorem = -1.0, tol_lemma = 0.05, tol_identity = 1e-8;
    std::string beta_grid_text, sigma2_grid_text;

    auto add_model = [&](CLI::App* c) {
        c->add_option("--beta", cfg.model.beta, "transmission coefficient");
        c->add_option("--gamma", cfg.model.gamma, "cure rate");
        c->add_option("--mu", cfg.model.mu, "per-capita death rate");
        CLI::Option* s = c->add_option("--sigma", cfg.model.sigma, "noise intensity");
        CLI::Option* s2 = c->add_option("--sigma2", sigma2, "squared noise intensity");
        s->excludes(s2);
        s2->excludes(s);
        c->add_option("--capacity", cfg.model.capacity, "total population N");
        c->add_option("--i0", cfg.model.i0, "initial infected count");
        c->add_option("--config", config_path_arg,
                      "JSON run config; explicit flags override it");
    };
    auto add_scheme = [&](CLI::App* c) {
        c->add_option("--scheme", scheme_name, "stepping scheme")
            ->check(CLI::IsMember({"em-state", "em-log", "milstein"}));
        c->add_option("--dt", cfg.scheme.dt, "step size");
        c->add_option("--t-end", cfg.scheme.t_end, "time horizon");
        c->add_option("--clamp-eps", cfg.scheme.clamp_eps, "relative clamp width");
        c->add_option("--extinction-eps", cfg.scheme.extinction_eps,
                      "stop when I <= this; 0 disables, negative means 1e-10*N");
        c->add_option("--record-stride", cfg.scheme.record_stride,
                      "record every k-th step; 0 targets 10000 samples");
    };
    auto add_ensemble = [&](CLI::App* c) {
        c->add_option("--paths", cfg.ensemble.n_paths, "number of paths");
        c->add_option("--seed", cfg.ensemble.base_seed,
                      "base seed; SIS_SEED env is the fallback");
        c->add_option("--workers", cfg.ensemble.max_workers,
                      "worker threads; 0 uses all cores");
    };
    auto add_output = [&](CLI::App* c, bool with_dump) {
        c->add_option("--out", cfg.out_path, "output file; - for stdout");
        c->add_option("--format", format_name, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        if (with_dump)
            c->add_flag("--dump-paths", cfg.dump_paths,
                        "also write per-path series to OUT.paths.csv");
    };

    CLI::App* c_classify =
        app.add_subcommand("classify", "classify the parameter regime");
    add_model(c_classify);
    add_output(c_classify, false);

    CLI::App* c_simulate =
        app.add_subcommand("simulate", "simulate one path and print its series");
    add_model(c_simulate);
    add_scheme(c_simulate);
    c_simulate->add_option("--seed", cfg.ensemble.base_seed,
                           "stream seed; SIS_SEED env is the fallback");
    c_simulate->add_option("--path-index", path_index, "stream index under the seed");
    add_output(c_simulate, false);

    CLI::App* c_ensemble =
        app.add_subcommand("ensemble", "run an ensemble and print the report");
    add_model(c_ensemble);
    add_scheme(c_ensemble);
    add_ensemble(c_ensemble);
    add_output(c_ensemble, true);

    CLI::App* c_verify = app.add_subcommand(
        "verify", "run an ensemble and check the analytic predictions");
    add_model(c_verify);
    add_scheme(c_verify);
    add_ensemble(c_verify);
    add_output(c_verify, false);
    c_verify->add_option("--tol-theorem", tol_theorem,
                         "relative tolerance for the rate bound; negative picks "
                         "the case default (0.25 two-sided, 0.10 one-sided)");
    c_verify->add_option("--tol-lemma", tol_lemma,
                         "relative tolerance for the time-average bound");
    c_verify->add_option("--tol-identity", tol_identity,
                         "max relative residual of the integral identity");

    CLI::App* c_sweep =
        app.add_subcommand("sweep", "run ensembles over a parameter grid");
    add_model(c_sweep);
    add_scheme(c_sweep);
    add_ensemble(c_sweep);
    add_output(c_sweep, false);
    c_sweep->add_option("--beta-grid", beta_grid_text, "lo:hi:count grid for beta");
    c_sweep->add_option("--sigma2-grid", sigma2_grid_text,
                        "lo:hi:count grid for sigma^2");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App* cmd = app.get_subcommands().front();
    auto given = [&](const std::string& name) {
        const CLI::Option* o = cmd->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };

    try {
        if (given("--sigma2")) {
            if (!(sigma2 >= 0.0))
                throw std::invalid_argument("--sigma2 must be >= 0");
            cfg.model.sigma = std::sqrt(sigma2);
        }
        if (!given("--seed")) {
            if (const char* env = std::getenv("SIS_SEED"))
                cfg.ensemble.base_seed = parse_u64(env, "SIS_SEED");
        }
        cfg.scheme.scheme = parse_scheme(scheme_name);
        cfg.output = format_name == "json" ? OutputFormat::Json : OutputFormat::Csv;

        const bool sweep_beta = cmd == c_sweep && !beta_grid_text.empty();
        const bool sweep_sigma = cmd == c_sweep && !sigma2_grid_text.empty();
        if (std::isnan(cfg.model.beta) && !sweep_beta)
            throw std::invalid_argument("missing --beta");
        if (std::isnan(cfg.model.gamma)) throw std::invalid_argument("missing --gamma");
        if (std::isnan(cfg.model.mu)) throw std::invalid_argument("missing --mu");
        if (std::isnan(cfg.model.capacity))
            throw std::invalid_argument("missing --capacity");
        if (std::isnan(cfg.model.i0)) throw std::invalid_argument("missing --i0");
        if (std::isnan(cfg.model.sigma) && !sweep_sigma)
            throw std::invalid_argument("missing --sigma or --sigma2");
        if (cmd != c_classify && !(cfg.scheme.t_end > 0.0))
            throw std::invalid_argument("missing or invalid --t-end");
        if (cmd == c_sweep && !sweep_beta && !sweep_sigma)
            throw std::invalid_argument("sweep needs --beta-grid or --sigma2-grid");
        // Grid-swept fields still need placeholders that pass validation.
        if (sweep_beta && std::isnan(cfg.model.beta)) cfg.model.beta = 1.0;
        if (sweep_sigma && std::isnan(cfg.model.sigma)) cfg.model.sigma = 0.0;

        std::ofstream file;
        std::ostream* os = &out;
        if (cfg.out_path != "-") {
            file.open(cfg.out_path);
            if (!file) {
                err << "error: cannot open " << cfg.out_path << "\n";
                return 3;
            }
            os = &file;
        }

        int rc = 0;
        if (cmd == c_classify) {
            rc = do_classify(cfg, *os);
        } else if (cmd == c_simulate) {
            rc = do_simulate(cfg, path_index, *os);
        } else if (cmd == c_ensemble) {
            rc = do_ensemble(cfg, *os, err);
        } else if (cmd == c_verify) {
            rc = do_verify(cfg, tol_theorem, tol_lemma, tol_identity, *os);
        } else {
            std::optional<GridSpec> bg, sg;
            if (sweep_beta) bg = parse_grid(beta_grid_text);
            if (sweep_sigma) sg = parse_grid(sigma2_grid_text);
            rc = do_sweep(cfg, bg, sg, *os);
        }

        os->flush();
        if (!*os) {
            err << "error: write failed\n";
            return 3;
        }
        return rc;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sis
