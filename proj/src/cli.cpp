#include "promo/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "promo/contract.hpp"
#include "promo/errors.hpp"
#include "promo/io.hpp"
#include "promo/lab.hpp"
#include "promo/oracle.hpp"

namespace promo {

namespace fs = std::filesystem;

namespace {

// verification tolerances
constexpr double kGittinsTol = 1e-6;
constexpr double kContractTol = 1e-8;
constexpr double kIrTol = 1e-8;
constexpr double kBoundTol = 1e-9;
constexpr double kBenchmarkTol = 1e-8;
constexpr double kSeBand = 3.0;

const std::set<std::string> kExperiments = {"tbar",      "reinforcing", "gap",
                                            "fasttrack", "seniority",   "convexcomp"};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

fs::path cache_dir(const CommandOptions& o) {
    if (!o.cache_dir.empty()) return o.cache_dir;
    if (const char* env = std::getenv("PROMO_CACHE_DIR"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache/promo";
    return ".promo-cache";
}

Json read_doc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Output directory plus its manifest, written before any result.
class Run {
public:
    Run(const std::string& command, const CommandOptions& o, const ContestConfig& cfg, std::uint64_t seed)
        : dir_(o.out) {
        if (dir_.empty()) throw ConfigError("--out is required");
        fs::create_directories(dir_);
        m_.command = command;
        m_.config_path = o.config;
        m_.config_hash = config_hash(cfg);
        m_.seed = seed;
        m_.threads = o.threads;
        m_.started = utc_now();
        save();
    }
    void write(const std::string& name, const std::string& text) {
        write_file_synced(dir_ / name, text);
        m_.outputs.push_back(name);
    }
    const std::string& hash() const { return m_.config_hash; }
    void finish() {
        m_.finished = utc_now();
        save();
    }

private:
    void save() { write_file_synced(dir_ / "manifest.json", dump(to_json(m_))); }
    fs::path dir_;
    RunManifest m_;
};

struct Loaded {
    Json doc;
    ContestConfig cfg;
};

Loaded load(const CommandOptions& o, std::ostream& log) {
    Loaded l;
    l.doc = read_doc(o.config);
    l.cfg = config_from_json(l.doc, fs::path(o.config).parent_path());
    bool bad = false;
    for (std::size_t i = 0; i < l.cfg.workers.size(); ++i)
        for (const auto& v : validate(l.cfg.workers[i].chain)) {
            log << "worker " << i << ": " << v.kind << ": " << v.message << "\n";
            bad = true;
        }
    if (bad) throw ConfigError("chain validation failed");
    if (o.seed) l.cfg.seed = *o.seed;
    if (o.replications) l.cfg.replications = *o.replications;
    return l;
}

Contest build(const ContestConfig& cfg, const CommandOptions& o, std::ostream& log) {
    const Contest c = prepare_contest(cfg, {}, cached_tables(cache_dir(o), [&](const std::string& s) {
                                          log << s << "\n";
                                      }));
    for (const auto& w : c.warnings) log << "warning: " << w << "\n";
    return c;
}

template <class F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DiscretizationError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const SizeError& e) {
        log << "instance too large: " << e.what() << "\n";
        return kTooLarge;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kVerifyFailed;
    }
}

} // namespace

int cmd_index(const CommandOptions& o, std::ostream& log) {
    return guarded(log, [&] {
        const Loaded l = load(o, log);
        const Contest c = build(l.cfg, o, log);
        Run run("index", o, l.cfg, l.cfg.seed);
        for (int i = 0; i < c.size(); ++i) {
            const std::string stem = "index_worker" + std::to_string(i);
            run.write(stem + ".json", dump(to_json(*c.tables[i])));
            run.write(stem + ".csv", table_csv(*c.tables[i]));
        }
        run.finish();
        return int(kOk);
    });
}

int cmd_simulate(const CommandOptions& o, std::ostream& log) {
    return guarded(log, [&] {
        const Loaded l = load(o, log);
        const Contest c = build(l.cfg, o, log);
        Run run("simulate", o, l.cfg, l.cfg.seed);
        std::vector<ContestTrace> traces;
        RunOptions ro;
        ro.record = o.keep_traces > 0;
        const ContestSummary s =
            simulate(c, l.cfg.replications, l.cfg.seed, o.threads, {}, ro.record ? &traces : nullptr, ro);
        if (s.capped > 0) log << "warning: " << s.capped << " traces hit the horizon cap\n";
        Json j = to_json(s);
        j["config_hash"] = run.hash();
        j["seed"] = l.cfg.seed;
        j["version"] = kToolVersion;
        run.write("summary.json", dump(j));
        if (ro.record) {
            traces.resize(std::min<std::size_t>(traces.size(), std::size_t(o.keep_traces)));
            run.write("traces.csv", trace_csv(traces));
        }
        run.finish();
        return int(kOk);
    });
}

int cmd_verify(const CommandOptions& o, std::ostream& log) {
    return guarded(log, [&] {
        if (o.family != "standard") throw ConfigError("unknown family '" + o.family + "' (standard)");
        const Loaded l = load(o, log);
        const Contest c = build(l.cfg, o, log);
        Run run("verify", o, l.cfg, l.cfg.seed);
        Json checks = Json::array();
        bool all = true;
        auto record = [&](const std::string& name, bool pass, Json detail) {
            log << (pass ? "PASS " : "FAIL ") << name << "\n";
            all = all && pass;
            checks.push_back({{"check", name}, {"pass", pass}, {"detail", std::move(detail)}});
        };

        std::set<const WorkerModel*> done;
        for (int i = 0; i < c.size(); ++i) {
            const WorkerModel& M = *c.models[i];
            if (!done.insert(&M).second) continue;
            const std::string w = "worker" + std::to_string(i);
            double worst = 0;
            for (int x = 0; x < M.size(); ++x)
                worst = std::max(worst, std::abs(brute_force_gittins(M.spec, x) - c.tables[i]->gittins(x)));
            record(w + ".gittins_vs_enumeration", worst <= kGittinsTol, {{"max_abs_diff", worst}});

            const SingleArmContract sc = single_arm_contract(M, *c.tables[i], c.W());
            const SingleArmOracle so = brute_force_single_arm(M.spec, c.W());
            record(w + ".single_arm_vs_enumeration",
                   std::abs(sc.principal_value - so.value) <= kContractTol && so.corridor,
                   {{"contract", sc.principal_value}, {"oracle", so.value},
                    {"corridor", so.corridor}, {"structure", so.structure},
                    {"candidates", so.candidates}});
        }

        const IrReport ir = check_ir(c, index_policy());
        record("index_contest_ir", ir.ok(kIrTol), to_json(ir));

        const ProductEvaluation ev = evaluate_exact(c, index_policy());
        const ContestSummary s = simulate(c, l.cfg.replications, l.cfg.seed, o.threads);
        const double gap = std::abs(s.principal.mean - ev.envelope);
        record("envelope_identity", gap <= kSeBand * s.principal.se,
               {{"envelope_exact", ev.envelope}, {"principal_exact", ev.principal},
                {"principal_mc", to_json(s)["principal"]}, {"abs_diff", gap}});

        const EnumerationReport fam = enumerate_feasible_contests(c, standard_family(c), kIrTol);
        long above = 0;
        for (const auto& r : fam.results) above += r.feasible && r.value > ev.envelope + kBoundTol;
        Json fj = to_json(fam, run.hash());
        fj["above_envelope"] = above;
        fj["envelope"] = ev.envelope;
        run.write("oracle_report.json", dump(fj));
        record("family_below_envelope", above == 0, fj);

        bool zero_cost = true;
        for (const auto& w : l.cfg.workers) zero_cost = zero_cost && (w.cost.array() == 0).all();
        if (zero_cost) {
            const double classical = bandit_retirement_value(c);
            bool never = true;
            for (const auto& M : c.models)
                for (int t : M->threshold) never = never && t == M->size();
            record("zero_cost_benchmark",
                   std::abs(ev.principal - classical) <= kBenchmarkTol && never &&
                       s.promotion_share == std::vector<double>(c.size(), 0.0),
                   {{"contest_value", ev.principal}, {"gittins_retirement_value", classical},
                    {"thresholds_never", never}, {"promotion_share", s.promotion_share}});
        }

        run.write("verify.json", dump({{"config_hash", run.hash()}, {"pass", all}, {"checks", checks}}));
        run.finish();
        return int(all ? kOk : kVerifyFailed);
    });
}

int cmd_experiment(const std::string& name, const CommandOptions& o, std::ostream& log) {
    if (!kExperiments.count(name)) {
        log << "unknown experiment '" << name << "'; known:";
        for (const auto& n : kExperiments) log << ' ' << n;
        log << "\n";
        return kUsage;
    }
    return guarded(log, [&] {
        const Loaded l = load(o, log);
        const Json ex = l.doc.value("experiment", Json::object()).value(name, Json::object());
        const std::uint64_t seed = l.cfg.seed;
        const long reps = l.cfg.replications;
        Run run("experiment " + name, o, l.cfg, seed);
        ExperimentReport rep;
        if (name == "tbar") {
            rep = tbar_experiment(ex.at("lam"), ex.at("c"), ex.at("g"), ex.at("r"), ex.value("mu", 1.0),
                                  ex.value("delta", 1e-3), reps, seed, o.threads);
        } else if (name == "reinforcing") {
            rep = reinforcing_check(build(l.cfg, o, log), ex.value("delta", 0.5), reps, seed, o.threads);
        } else if (name == "gap") {
            GapConfig g;
            g.contest = l.cfg;
            g.advantaged = ex.value("advantaged", 1);
            g.randomize_priority = ex.value("randomize_priority", false);
            g.decomposition = ex.value("decomposition", false);
            rep = promotion_gap_experiment(g, reps, seed, o.threads);
        } else if (name == "fasttrack" || name == "seniority") {
            const Contest c = build(l.cfg, o, log);
            std::vector<ContestTrace> traces;
            RunOptions ro;
            ro.record = true;
            simulate(c, reps, seed, o.threads, {}, &traces, ro);
            if (name == "fasttrack") {
                rep = fast_track_stat(c, traces);
            } else {
                const auto& chain = c.models[0]->spec.chain;
                const int x = ex.contains("type") ? nearest_state(chain, ex.at("type").get<double>())
                                                  : ex.value("state", c.models[0]->spec.initial);
                rep = seniority_stat(c, traces, x, ex.value("times", std::vector<double>{0, 5, 10}),
                                     ex.value("min_mass", 30L));
            }
            rep.seed = seed;
        } else {
            CompensationConfig cc;
            cc.contest = l.cfg;
            cc.prizes = ex.at("prizes").get<std::vector<double>>();
            cc.stakes = ex.value("stakes", 2.0);
            cc.replications = reps;
            rep = convex_compensation(cc, seed, o.threads);
        }
        rep.config_hash = run.hash();
        run.write("report.json", dump(to_json(rep)));
        run.write("report.csv", report_csv(rep));
        run.finish();
        for (const auto& cl : rep.claims) log << (cl.pass ? "PASS " : "FAIL ") << cl.name << "\n";
        if (rep.inconclusive) log << "inconclusive: insufficient conditioning mass\n";
        return int(rep.ok() ? kOk : kVerifyFailed);
    });
}

int run_cli(int argc, char** argv) {
    CLI::App app{"promo: index contests for promotion under learning"};
    app.require_subcommand(1);
    CommandOptions o;
    std::uint64_t seed = 0;
    long reps = 0;
    std::string name;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", o.config, "contest config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory")->required();
        sub->add_option("--seed", seed, "master seed, overrides the config");
        sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--cache-dir", o.cache_dir, "index table cache (default $PROMO_CACHE_DIR)");
    };
    auto* idx = app.add_subcommand("index", "build index tables");
    common(idx);
    auto* sim = app.add_subcommand("simulate", "simulate the index contest");
    common(sim);
    sim->add_option("--replications", reps, "replications, overrides the config");
    sim->add_option("--traces", o.keep_traces, "traces written to traces.csv");
    auto* ver = app.add_subcommand("verify", "oracle checks on a small instance");
    common(ver);
    ver->add_option("--replications", reps, "Monte Carlo replications for the envelope check");
    ver->add_option("--family", o.family, "policy family for the upper bound check");
    auto* exp = app.add_subcommand("experiment", "run a lab experiment");
    exp->add_option("name", name, "tbar | reinforcing | gap | fasttrack | seniority | convexcomp")
        ->required();
    common(exp);
    exp->add_option("--replications", reps, "replications, overrides the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : int(kUsage);
    }
    for (auto* sub : {idx, sim, ver, exp}) {
        if (sub->count("--seed")) o.seed = seed;
        if (sub->get_option_no_throw("--replications") && sub->count("--replications")) o.replications = reps;
    }
    if (*idx) return cmd_index(o, std::cerr);
    if (*sim) return cmd_simulate(o, std::cerr);
    if (*ver) return cmd_verify(o, std::cerr);
    return cmd_experiment(name, o, std::cerr);
}

} // namespace promo
