#include "promo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "promo/errors.hpp"

namespace promo {

namespace fs = std::filesystem;

namespace {

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

Vec json_vec(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
    Vec v(Eigen::Index(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) throw ConfigError(std::string(what) + " must hold numbers");
        v(Eigen::Index(k)) = j[k].get<double>();
    }
    return v;
}

template <class T>
T need(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? need<T>(j, key) : fallback;
}

Json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open " + p.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

Json mc_json(const McEstimate& e) { return {{"mean", e.mean}, {"se", e.se}, {"n", e.n}}; }

} // namespace

Json to_json(const TypeChain& chain) {
    Json kernel = Json::array();
    for (int i = 0; i < chain.size(); ++i) kernel.push_back(vec_json(chain.kernel().row(i).transpose()));
    return {{"grid", vec_json(chain.grid())},
            {"kernel", kernel},
            {"step", chain.step()},
            {"jump_sign", to_string(chain.jump_sign())},
            {"boundary", {{"lower", to_string(chain.lower())}, {"upper", to_string(chain.upper())}}},
            {"origin", chain.origin()}};
}

TypeChain chain_from_json(const Json& j) {
    const Vec grid = json_vec(need<Json>(j, "grid"), "grid");
    const Json rows = need<Json>(j, "kernel");
    if (!rows.is_array() || rows.size() != std::size_t(grid.size()))
        throw ConfigError("kernel must have one row per grid point");
    Mat K(grid.size(), grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Vec r = json_vec(rows[i], "kernel row");
        if (r.size() != grid.size())
            throw ConfigError("kernel row " + std::to_string(i) + " has the wrong length");
        K.row(Eigen::Index(i)) = r.transpose();
    }
    Boundary lo = Boundary::absorbing, hi = Boundary::absorbing;
    if (j.contains("boundary")) {
        const Json& b = j.at("boundary");
        if (b.is_string()) {
            lo = hi = boundary_from(b.get<std::string>());
        } else {
            lo = boundary_from(need<std::string>(b, "lower"));
            hi = boundary_from(need<std::string>(b, "upper"));
        }
    }
    return TypeChain(grid, K, need<double>(j, "step"),
                     jump_sign_from(get_or<std::string>(j, "jump_sign", "none")), lo, hi,
                     get_or<int>(j, "origin", 0));
}

namespace {

TypeChain generated_chain(const Json& j, double step) {
    const auto family = need<std::string>(j, "family");
    const int n = need<int>(j, "grid_points");
    if (family == "bad_news")
        return build_bad_news_belief(need<double>(j, "p0"), need<double>(j, "lam"), n, step);
    if (family == "brownian")
        return build_brownian_belief(need<double>(j, "p0"), need<double>(j, "snr"), n, step);
    if (family == "ladder")
        return build_ladder_deadend(need<double>(j, "mu"), need<double>(j, "lam"),
                                    need<double>(j, "x_max"), n, step);
    throw ConfigError("unknown chain family '" + family + "' (bad_news, brownian, ladder)");
}

Vec payoff(const Json& j, const TypeChain& chain, const char* what) {
    if (j.is_number()) return Vec::Constant(chain.size(), j.get<double>());
    if (j.is_string() && j.get<std::string>() == "type") return chain.grid();
    if (j.is_object() && j.contains("type_scale")) return j.at("type_scale").get<double>() * chain.grid();
    return json_vec(j, what);
}

} // namespace

Json to_json(const WorkerSpec& spec) {
    return {{"chain", to_json(spec.chain)}, {"pi", vec_json(spec.pi)},
            {"cost", vec_json(spec.cost)},  {"prize", spec.prize},
            {"discount", spec.discount},    {"initial", spec.initial}};
}

WorkerSpec spec_from_json(const Json& j, double step, const fs::path& base) {
    WorkerSpec s;
    const Json c = need<Json>(j, "chain");
    try {
        if (c.contains("file"))
            s.chain = chain_from_json(read_json(base / need<std::string>(c, "file")));
        else if (c.contains("family"))
            s.chain = generated_chain(c, step);
        else
            s.chain = chain_from_json(c);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("chain: ") + e.what());
    } catch (const DiscretizationError& e) {
        throw ConfigError(std::string("chain: ") + e.what());
    }
    s.pi = payoff(need<Json>(j, "pi"), s.chain, "pi");
    s.cost = payoff(need<Json>(j, "cost"), s.chain, "cost");
    s.prize = need<double>(j, "prize");
    s.discount = need<double>(j, "discount");
    s.initial = get_or<int>(j, "initial", s.chain.origin());
    if (j.contains("initial_type")) s.initial = nearest_state(s.chain, need<double>(j, "initial_type"));
    const auto problems = check_spec(s);
    if (!problems.empty()) throw ConfigError("worker spec: " + problems.front());
    return s;
}

Json to_json(const ContestConfig& cfg) {
    Json w = Json::array();
    for (const auto& s : cfg.workers) w.push_back(to_json(s));
    return {{"workers", w},         {"outside_option", cfg.outside_option},
            {"priority", cfg.priority}, {"step", cfg.step},
            {"horizon_cap", cfg.horizon_cap}, {"replications", cfg.replications},
            {"seed", cfg.seed}};
}

ContestConfig config_from_json(const Json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ContestConfig cfg;
    cfg.step = need<double>(j, "step");
    cfg.outside_option = get_or<double>(j, "outside_option", 0.0);
    cfg.priority = get_or<std::vector<int>>(j, "priority", {});
    cfg.horizon_cap = get_or<double>(j, "horizon_cap", cfg.horizon_cap);
    cfg.replications = get_or<long>(j, "replications", cfg.replications);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    const Json ws = need<Json>(j, "workers");
    if (!ws.is_array() || ws.empty()) throw ConfigError("workers must be a nonempty array");
    for (std::size_t i = 0; i < ws.size(); ++i) {
        try {
            const Json& w = ws[i];
            const int copies = get_or<int>(w, "copies", 1);
            for (int k = 0; k < copies; ++k) cfg.workers.push_back(spec_from_json(w, cfg.step, base));
        } catch (const ConfigError& e) {
            throw ConfigError("worker " + std::to_string(i) + ": " + e.what());
        }
    }
    return cfg;
}

ContestConfig load_config(const fs::path& path) {
    return config_from_json(read_json(path), path.parent_path());
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string spec_hash(const WorkerSpec& spec) { return fnv1a_hex(to_json(spec).dump()); }

std::string config_hash(const ContestConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

Json to_json(const IndexTable& t) {
    Json states = Json::array();
    for (int id = 0; id < t.aug.size(); ++id) {
        const AugState& s = t.aug.state(id);
        states.push_back({s.x, s.m, t.aug.promoted(id) ? 1 : 0, t.strategic(id)});
    }
    return {{"format", kTableFormat},
            {"spec_hash", t.spec_hash},
            {"tol", t.tol},
            {"gittins", vec_json(t.gittins)},
            {"states", states}};
}

IndexTable table_from_json(const Json& j, const WorkerModel& model) {
    if (get_or<int>(j, "format", 0) != kTableFormat) throw ConfigError("table format differs");
    IndexTable t;
    t.spec_hash = need<std::string>(j, "spec_hash");
    if (t.spec_hash != spec_hash(model.spec)) throw ConfigError("table belongs to another spec");
    t.tol = need<double>(j, "tol");
    t.gittins = json_vec(need<Json>(j, "gittins"), "gittins");
    if (t.gittins.size() != model.size()) throw ConfigError("gittins has the wrong length");
    const int x0 = model.spec.initial;
    t.aug = AugmentedChain(model.spec.chain, model.threshold, {{x0, x0}});
    const Json states = need<Json>(j, "states");
    if (!states.is_array() || states.size() != std::size_t(t.aug.size()))
        throw ConfigError("table state set differs from the spec's");
    t.strategic.resize(t.aug.size());
    t.flow.resize(t.aug.size());
    for (int id = 0; id < t.aug.size(); ++id) {
        const Json& row = states[std::size_t(id)];
        const AugState& s = t.aug.state(id);
        if (!row.is_array() || row.size() != 4 || row[0].get<int>() != s.x ||
            row[1].get<int>() != s.m || row[2].get<int>() != int(t.aug.promoted(id)))
            throw ConfigError("table state " + std::to_string(id) + " differs from the spec's");
        t.strategic(id) = row[3].get<double>();
        t.flow(id) = t.aug.promoted(id) ? model.pibar(s.x) : model.spec.pi(s.x);
    }
    return t;
}

TableProvider cached_tables(const fs::path& dir, std::function<void(const std::string&)> log) {
    return [dir, log](const WorkerModel& model) {
        const std::string h = spec_hash(model.spec);
        const fs::path file = dir / (h + ".json");
        auto say = [&](const std::string& s) {
            if (log) log(s);
        };
        if (fs::exists(file)) {
            try {
                auto t = std::make_shared<IndexTable>(table_from_json(read_json(file), model));
                say("cache hit " + h);
                return std::shared_ptr<const IndexTable>(t);
            } catch (const std::exception& e) {
                say("cache stale " + h + " refused: " + e.what());
            }
        } else {
            say("cache miss " + h);
        }
        auto t = std::make_shared<IndexTable>(strategic_index(model));
        t->spec_hash = h;
        fs::create_directories(dir);
        write_file_synced(file, dump(to_json(*t)));
        return std::shared_ptr<const IndexTable>(t);
    };
}

Json to_json(const ContestSummary& s) {
    Json w = Json::array();
    for (const auto& e : s.worker_payoff) w.push_back(mc_json(e));
    return {{"replications", s.replications},
            {"principal", mc_json(s.principal)},
            {"envelope", mc_json(s.envelope)},
            {"promotion_share", s.promotion_share},
            {"outside_share", s.outside_share},
            {"capped", s.capped},
            {"time_quantiles", {{"levels", {0.1, 0.25, 0.5, 0.75, 0.9}}, {"values", s.time_quantiles}}},
            {"worker_payoff", w},
            {"index_rule_invariant", s.invariant_ok}};
}

Json to_json(const ExperimentReport& r) {
    Json stats = Json::array();
    for (const auto& s : r.stats)
        stats.push_back({{"name", s.name}, {"value", s.value}, {"se", s.se}, {"n", s.n}, {"kind", s.kind}});
    Json claims = Json::array();
    for (const auto& c : r.claims)
        claims.push_back({{"name", c.name}, {"pass", c.pass}, {"kind", c.kind}, {"detail", c.detail}});
    return {{"experiment", r.id},
            {"config_hash", r.config_hash},
            {"provenance", {{"seed", r.seed}, {"replications", r.replications}, {"step", r.delta}}},
            {"statistics", stats},
            {"claims", claims},
            {"notes", r.notes},
            {"inconclusive", r.inconclusive},
            {"pass", r.ok()}};
}

Json to_json(const EnumerationReport& r, const std::string& instance_hash) {
    Json witness = nullptr;
    for (const auto& c : r.results)
        if (c.name == r.best_name) witness = {{"policy", c.name}, {"value", c.value},
                                              {"min_worker", c.min_worker}, {"ir_witness", c.witness}};
    return {{"instance_hash", instance_hash}, {"family", r.family},
            {"n_candidates", r.n_candidates}, {"n_feasible", r.n_feasible},
            {"best_value", r.best_value},     {"witness", witness}};
}

Json to_json(const IrReport& r) {
    return {{"min_value", r.min_value}, {"worker", r.worker},     {"witness", r.witness},
            {"per_worker_min", r.per_worker_min}, {"states", r.states}};
}

std::string csv_header(const std::string& kind, const std::vector<std::string>& columns) {
    std::string s = "# promo " + kind + " v" + std::to_string(kCsvSchema) + "\n";
    for (std::size_t k = 0; k < columns.size(); ++k) s += (k ? "," : "") + columns[k];
    return s + "\n";
}

std::string report_csv(const ExperimentReport& r) {
    std::string s = csv_header("report", {"experiment", "statistic", "value", "se", "n", "kind"});
    for (const auto& st : r.stats)
        s += r.id + "," + csv_field(st.name) + "," + num(st.value) + "," + num(st.se) + "," +
             std::to_string(st.n) + "," + st.kind + "\n";
    for (const auto& c : r.claims)
        s += r.id + "," + csv_field("claim." + c.name) + "," + (c.pass ? "1" : "0") + ",0,0," + c.kind + "\n";
    return s;
}

std::string table_csv(const IndexTable& t) {
    std::string s = csv_header("index", {"x", "m", "promoted", "gittins", "strategic"});
    for (int id = 0; id < t.aug.size(); ++id) {
        const AugState& st = t.aug.state(id);
        s += std::to_string(st.x) + "," + std::to_string(st.m) + "," +
             (t.aug.promoted(id) ? "1" : "0") + "," + num(t.gittins(st.x)) + "," +
             num(t.strategic(id)) + "\n";
    }
    return s;
}

std::string trace_csv(const std::vector<ContestTrace>& traces, long first) {
    std::ostringstream os;
    os << csv_header("trace", {"replication", "t", "worker", "x", "m", "index", "action"});
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const ContestTrace& tr = traces[k];
        const long rep = first + long(k);
        for (const auto& e : tr.events)
            os << rep << ',' << e.t << ',' << e.worker << ',' << e.pre.x << ',' << e.pre.m << ','
               << num(e.index) << ',' << e.action << '\n';
        os << rep << ',' << tr.end_step << ',' << tr.winner << ',' << tr.promoted_at.x << ','
           << tr.promoted_at.m << ',' << num(tr.principal_payoff) << ",summary:"
           << to_string(tr.outcome) << '\n';
    }
    return os.str();
}

Json to_json(const RunManifest& m) {
    return {{"command", m.command},   {"config_path", m.config_path},
            {"config_hash", m.config_hash}, {"seed", m.seed},
            {"threads", m.threads},   {"version", m.version},
            {"started", m.started},   {"finished", m.finished},
            {"outputs", m.outputs}};
}

void write_file_synced(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw std::runtime_error("cannot write " + tmp.string());
    std::size_t done = 0;
    while (done < text.size()) {
        const ssize_t w = ::write(fd, text.data() + done, text.size() - done);
        if (w < 0) {
            ::close(fd);
            throw std::runtime_error("write failed on " + tmp.string());
        }
        done += std::size_t(w);
    }
    ::fsync(fd);
    ::close(fd);
    fs::rename(tmp, path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace promo
