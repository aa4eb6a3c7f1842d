#include "promo/lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "promo/errors.hpp"

namespace promo {

bool ExperimentReport::ok() const {
    return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.pass; });
}

const Statistic* ExperimentReport::stat(const std::string& name) const {
    for (const auto& s : stats)
        if (s.name == name) return &s;
    return nullptr;
}

const Claim* ExperimentReport::claim(const std::string& name) const {
    for (const auto& c : claims)
        if (c.name == name) return &c;
    return nullptr;
}

void ExperimentReport::add(const std::string& name, double value, double se, long n,
                           const std::string& kind) {
    stats.push_back({name, value, se, n, kind});
}

void ExperimentReport::check(const std::string& name, bool pass, const std::string& kind,
                             const std::string& detail) {
    claims.push_back({name, pass, kind, detail});
}

double tbar(double lam, double c, double g, double r) {
    if (!(lam > 0 && c > 0 && r > 0) || g < 0) throw DomainError("tbar: need lam, c, r > 0, g >= 0");
    const double a = r + lam;
    const double arg = 1 - g * a / (lam * c);
    if (!(arg > 0)) throw DomainError("tbar: prize too large, the threshold never binds");
    return -std::log(arg) / a;
}

double tbar_quadrature(double lam, double c, double g, double r) {
    if (!(lam > 0 && c > 0 && r > 0) || g < 0) throw DomainError("tbar: need lam, c, r > 0, g >= 0");
    const double a = r + lam;
    if (!(g * a < lam * c)) throw DomainError("tbar: prize too large, the threshold never binds");
    auto lhs = [&](double t) {
        const int m = 2000; // Simpson panels, even
        const double h = t / m;
        double s = 1 + std::exp(-a * t);
        for (int k = 1; k < m; ++k) s += (k % 2 ? 4 : 2) * std::exp(-a * k * h);
        return lam * c * s * h / 3;
    };
    double lo = 0, hi = 1;
    while (lhs(hi) < g) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lhs(mid) < g ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double climb_time_break_even(double lam, double c, double g, double r) {
    if (!(lam >= 0 && c > 0 && r > 0) || g < 0) throw DomainError("climb time: bad parameters");
    const double a = r + lam;
    return std::log1p(g * a / c) / a;
}

double no_dead_end_probability(double lam, double t) { return std::exp(-lam * t); }

std::vector<double> two_worker_shares(double d) { return {1 - (1 - d) * d, (1 - d) * d}; }

double reinforcing_bound(double d, int leaders) { return std::pow(1 - d, leaders); }

double gamblers_ruin(double up, double down, int start, int lo, int hi) {
    if (!(up > 0) || down < 0 || lo >= hi) throw DomainError("gamblers_ruin: bad parameters");
    if (start <= lo) return 0;
    if (start >= hi) return 1;
    if (std::abs(up - down) < 1e-15) return double(start - lo) / double(hi - lo);
    const double q = down / up;
    return (1 - std::pow(q, start - lo)) / (1 - std::pow(q, hi - lo));
}

namespace {

McEstimate mean_se(const std::vector<double>& v) {
    McEstimate e;
    e.n = long(v.size());
    if (v.empty()) return e;
    e.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double ss = 0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1) / double(v.size())) : 0.0;
    return e;
}

McEstimate proportion(long hits, long n) {
    McEstimate e;
    e.n = n;
    if (n == 0) return e;
    e.mean = double(hits) / double(n);
    e.se = std::sqrt(e.mean * (1 - e.mean) / double(n));
    return e;
}

bool within(double est, double se, double target, double k = 3) {
    return std::abs(est - target) <= k * se + 1e-15;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

McEstimate reach_before_drop(const TypeChain& chain, int start, int target, long replications,
                             std::uint64_t seed, int threads, long cap) {
    std::vector<char> hit(replications, 0);
    parallel_for(replications, threads, [&](long k) {
        Rng rng = Rng::substream(seed, std::uint64_t(k), 11);
        int x = start;
        for (long t = 0; t < cap && x < target; ++t) {
            x = step(chain, x, rng);
            if (x < start) return;
        }
        hit[k] = x >= target;
    });
    return proportion(std::count(hit.begin(), hit.end(), 1), replications);
}

double exact_reach_probability(const TypeChain& chain, int start, int target) {
    if (start >= target) return 1;
    const int m = target - start;
    const Mat& K = chain.kernel();
    Mat A = Mat::Identity(m, m);
    Vec b = Vec::Zero(m);
    for (int a = 0; a < m; ++a) {
        const int x = start + a;
        for (int y = 0; y < chain.size(); ++y) {
            if (y >= target)
                b(a) += K(x, y);
            else if (y >= start)
                A(a, y - start) -= K(x, y);
        }
    }
    return A.partialPivLu().solve(b)(0);
}

std::vector<TrialEstimate> first_trial_success(const Contest& contest, long replications,
                                               std::uint64_t seed, int threads) {
    const int n = contest.size();
    std::vector<double> g0(n);
    for (int i = 0; i < n; ++i) {
        const int x0 = contest.models[i]->spec.initial;
        g0[i] = contest.index(i, contest.tables[i]->aug.id(x0, x0));
    }
    const double top = *std::max_element(g0.begin(), g0.end());
    std::vector<TrialEstimate> out;
    for (int i = 0; i < n; ++i) {
        if (g0[i] != top) continue;
        const WorkerModel& M = *contest.models[i];
        TrialEstimate e;
        e.worker = i;
        e.start = M.spec.initial;
        e.target = M.threshold[e.start];
        e.success = reach_before_drop(M.spec.chain, e.start, e.target, replications,
                                      seed + std::uint64_t(i), threads);
        out.push_back(e);
    }
    return out;
}

ExperimentReport reinforcing_check(const Contest& contest, double delta, long replications,
                                   std::uint64_t seed, int threads) {
    ExperimentReport rep;
    rep.id = "reinforcing";
    rep.seed = seed;
    rep.replications = replications;
    rep.delta = contest.config.step;
    bool all = true;
    for (const auto& e : first_trial_success(contest, replications, seed, threads)) {
        const std::string tag = "worker" + std::to_string(e.worker);
        const WorkerModel& M = *contest.models[e.worker];
        rep.add(tag + ".first_trial_success", e.success.mean, e.success.se, e.success.n,
                "statistical");
        const double exact = e.target >= M.size()
                                 ? 0.0
                                 : exact_reach_probability(M.spec.chain, e.start, e.target);
        rep.add(tag + ".first_trial_exact", exact);
        rep.add(tag + ".trial_target_state", e.target);
        rep.check(tag + ".mc_matches_first_passage", within(e.success.mean, e.success.se, exact),
                  "statistical");
        all = all && e.success.mean > delta + 2 * e.success.se;
    }
    rep.add("delta", delta);
    rep.check("reinforcing_at_delta", all, "statistical",
              "every leading worker's estimate exceeds delta by 2 SE");
    return rep;
}

ExperimentReport tbar_experiment(double lam, double c, double g, double r, double mu,
                                 double delta, long replications, std::uint64_t seed,
                                 int threads) {
    ExperimentReport rep;
    rep.id = "tbar";
    rep.seed = seed;
    rep.replications = replications;
    rep.delta = delta;
    const double t = tbar(lam, c, g, r);
    const double tq = tbar_quadrature(lam, c, g, r);
    rep.add("tbar", t, 0, 0, "closed_form");
    rep.add("tbar_quadrature", tq, 0, 0, "closed_form");
    rep.check("closed_form_matches_quadrature", std::abs(t - tq) <= 1e-10, "exact");
    const double tb = climb_time_break_even(lam, c, g, r);
    rep.add("climb_time_break_even", tb, 0, 0, "closed_form");
    rep.notes.push_back("the worker who is dismissed at his first dead end breaks even at climb "
                        "time " + fmt(tb) + ", not at tbar = " + fmt(t) +
                        "; ladder thresholds computed from the worker's value follow the former");

    // one-cell-per-step ladder, start one cell above the dead end
    const int k = int(std::ceil(t / delta - 1e-9));
    const double h = mu * delta;
    const int G = k + 3;
    const TypeChain chain = build_ladder_deadend(mu, lam, h * (G - 1), G, delta);
    const McEstimate mc = reach_before_drop(chain, 1, 1 + k, replications, seed, threads);
    const double target = no_dead_end_probability(lam, t);
    const double complement = 1 - target;
    rep.add("first_trial_success", mc.mean, mc.se, mc.n, "statistical");
    rep.add("no_dead_end_probability", target, 0, 0, "closed_form");
    rep.add("first_trial_chain_exact", std::pow(1 - lam * delta, k), 0, 0, "closed_form");
    rep.add("dead_end_probability", complement, 0, 0, "closed_form");
    rep.check("mc_matches_no_dead_end", within(mc.mean, mc.se, target), "statistical");
    const bool flag = !within(mc.mean, mc.se, complement);
    rep.check("complement_expression_rejected", flag, "statistical",
              "1 - e^{-lam tbar} is the chance of a dead end during the climb; the first worker "
              "wins his first trial with probability e^{-lam tbar}");
    rep.notes.push_back("complement 1 - e^{-lam tbar} = " + fmt(complement) +
                        " versus derived e^{-lam tbar} = " + fmt(target) +
                        "; the Monte Carlo estimate is " + fmt(mc.mean) + " (SE " + fmt(mc.se) +
                        ")");
    return rep;
}

ExperimentReport promotion_gap_experiment(const GapConfig& cfg, long replications,
                                          std::uint64_t seed, int threads) {
    const Contest base = prepare_contest(cfg.contest);
    const int n = base.size();
    const int K = cfg.advantaged;
    if (K < 1 || K >= n) throw ConfigError("gap experiment needs both groups nonempty");

    ExperimentReport rep;
    rep.id = "gap";
    rep.seed = seed;
    rep.replications = replications;
    rep.delta = base.config.step;

    std::vector<std::vector<int>> perms;
    std::map<std::vector<int>, int> perm_id;
    std::vector<Contest> variants;
    std::vector<int> which(replications, -1);
    if (cfg.randomize_priority) {
        if (n > 6) throw SizeError("priority randomization supports at most 6 workers");
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            Contest c = base;
            for (int k = 0; k < n; ++k) c.rank[p[k]] = k;
            perm_id[p] = int(variants.size());
            variants.push_back(std::move(c));
        } while (std::next_permutation(p.begin(), p.end()));
        for (long k = 0; k < replications; ++k) {
            Rng rng = Rng::substream(seed, std::uint64_t(k), 13);
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
            which[k] = perm_id[order];
        }
    }

    std::vector<int> winner(replications);
    std::vector<double> when(replications), type_at(replications);
    parallel_for(replications, threads, [&](long k) {
        Rng rng = Rng::substream(seed, std::uint64_t(k));
        const Contest& c = which[k] >= 0 ? variants[which[k]] : base;
        const ContestTrace tr = run_index_contest(c, rng);
        winner[k] = tr.outcome == Outcome::promoted ? tr.winner : -1;
        when[k] = double(tr.end_step) * c.config.step;
        type_at[k] = winner[k] >= 0
                         ? c.models[winner[k]]->spec.chain.grid()(tr.promoted_at.x)
                         : std::nan("");
    });

    auto group = [&](int i) { return i < K ? 0 : 1; };
    const char* names[2] = {"advantaged", "disadvantaged"};
    long capped = 0;
    for (long k = 0; k < replications; ++k) capped += winner[k] < 0;
    rep.add("not_promoted_share", double(capped) / double(std::max(1L, replications)));

    std::vector<McEstimate> member(n);
    for (int i = 0; i < n; ++i) {
        long hits = 0;
        for (long k = 0; k < replications; ++k) hits += winner[k] == i;
        member[i] = proportion(hits, replications);
        rep.add("worker" + std::to_string(i) + ".promotion_probability", member[i].mean,
                member[i].se, member[i].n, "statistical");
    }
    double group_p[2] = {0, 0};
    for (int gi = 0; gi < 2; ++gi) {
        long hits = 0;
        std::vector<double> t, x;
        for (long k = 0; k < replications; ++k)
            if (winner[k] >= 0 && group(winner[k]) == gi) {
                hits++;
                t.push_back(when[k]);
                x.push_back(type_at[k]);
            }
        const McEstimate p = proportion(hits, replications);
        group_p[gi] = p.mean;
        const McEstimate mt = mean_se(t), mx = mean_se(x);
        rep.add(std::string(names[gi]) + ".promotion_probability", p.mean, p.se, p.n,
                "statistical");
        rep.add(std::string(names[gi]) + ".mean_time_to_promotion", mt.mean, mt.se, mt.n,
                "statistical");
        rep.add(std::string(names[gi]) + ".mean_type_at_promotion", mx.mean, mx.se, mx.n,
                "statistical");
    }
    (void)group_p;

    // first-trial success of the advantaged workers
    double d_hat = 1, d_se = 0, d_exact = 1;
    for (int i = 0; i < K; ++i) {
        const WorkerModel& M = *base.models[i];
        const int x0 = M.spec.initial, target = M.threshold[x0];
        const McEstimate e = reach_before_drop(M.spec.chain, x0, target, replications,
                                               seed ^ (0x5eedull + std::uint64_t(i)), threads);
        if (e.mean < d_hat) {
            d_hat = e.mean;
            d_se = e.se;
            d_exact = target >= M.size() ? 0.0 : exact_reach_probability(M.spec.chain, x0, target);
        }
    }
    rep.add("delta_hat", d_hat, d_se, replications, "statistical");
    rep.add("delta_exact", d_exact);
    const double bound = reinforcing_bound(d_hat, K);
    rep.add("bound", bound, 0, 0, "closed_form");
    if (!cfg.randomize_priority) {
        long hits = 0;
        for (long k = 0; k < replications; ++k) hits += winner[k] >= K;
        const McEstimate p = proportion(hits, replications);
        rep.check("disadvantaged_below_bound", p.mean <= bound + 3 * p.se, "statistical",
                  "disadvantaged promotion probability <= (1 - delta_hat)^K + 3 SE");
    }

    // identical pair: the priority leader gets the first trial and, since ties
    // at the bottom go his way, every promotion the second one does not win
    if (cfg.decomposition) {
        if (n != 2 || cfg.randomize_priority || base.tables[0] != base.tables[1])
            throw ConfigError("the decomposition needs two identical workers in fixed priority");
        const int first = base.rank[0] < base.rank[1] ? 0 : 1;
        const WorkerModel& M = *base.models[first];
        const int x0 = M.spec.initial, target = M.threshold[x0];
        const double d = target >= M.size() ? 0.0 : exact_reach_probability(M.spec.chain, x0, target);
        const auto shares = two_worker_shares(d);
        const int second = 1 - first;
        rep.add("decomposition.first", shares[0], 0, 0, "closed_form");
        rep.add("decomposition.second", shares[1], 0, 0, "closed_form");
        rep.check("shares_match_decomposition",
                  within(member[first].mean, member[first].se, shares[0]) &&
                      within(member[second].mean, member[second].se, shares[1]),
                  "statistical", "first trial / second trial decomposition");
    }
    if (cfg.randomize_priority) {
        const double pa = group_p[0] / K, pb = group_p[1] / (n - K);
        const double va = pa * (1 - pa) / (double(replications) * K);
        const double vb = pb * (1 - pb) / (double(replications) * (n - K));
        const double z = (pa - pb) / std::sqrt(std::max(va + vb, 1e-300));
        rep.add("two_sample_z", z);
        rep.check("groups_indistinguishable", std::abs(z) < 2.5758, "statistical",
                  "two-sample test on per-member promotion rates at the 1% level");
    }
    return rep;
}

ExperimentReport fast_track_stat(const Contest& contest, const std::vector<ContestTrace>& traces) {
    ExperimentReport rep;
    rep.id = "fasttrack";
    rep.replications = long(traces.size());
    rep.delta = contest.config.step;
    long promoted = 0, off_threshold = 0, rising = 0, unrecorded = 0;
    std::vector<double> t, x;
    for (const auto& tr : traces) {
        if (tr.threshold_paths.empty()) unrecorded++;
        for (const auto& path : tr.threshold_paths)
            for (std::size_t k = 1; k < path.size(); ++k) rising += path[k] > path[k - 1];
        if (tr.outcome != Outcome::promoted) continue;
        promoted++;
        const WorkerModel& M = *contest.models[tr.winner];
        if (tr.promoted_at.x != M.threshold[tr.promoted_at.m]) off_threshold++;
        t.push_back(double(tr.end_step) * contest.config.step);
        x.push_back(M.spec.chain.grid()(tr.promoted_at.x));
    }
    rep.add("promoted", double(promoted));
    rep.add("promoted_off_threshold", double(off_threshold));
    rep.add("threshold_increases", double(rising));
    rep.check("type_at_promotion_is_threshold", off_threshold == 0);
    rep.check("threshold_path_nonincreasing", rising == 0 && unrecorded == 0, "exact",
              unrecorded ? "traces were not recorded" : "");

    // least squares slope of type at promotion on promotion time
    const double n = double(t.size());
    double mt = 0, mx = 0;
    for (std::size_t k = 0; k < t.size(); ++k) mt += t[k] / n, mx += x[k] / n;
    double stt = 0, stx = 0;
    bool constant_type = true;
    for (std::size_t k = 0; k < t.size(); ++k) {
        stt += (t[k] - mt) * (t[k] - mt);
        stx += (t[k] - mt) * (x[k] - mx);
        constant_type = constant_type && x[k] == x[0];
    }
    if (t.size() < 3 || stt <= 0 || constant_type) {
        rep.add("slope", 0);
        rep.check("slope_nonpositive", true, "statistical",
                  constant_type ? "degenerate: type at promotion constant"
                                : "degenerate: promotion time constant");
        return rep;
    }
    const double slope = stx / stt;
    double sse = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = x[k] - mx - slope * (t[k] - mt);
        sse += e * e;
    }
    const double se = std::sqrt(sse / (n - 2) / stt);
    rep.add("slope", slope, se, long(t.size()), "statistical");
    rep.check("slope_nonpositive", slope + 1.6449 * se <= 0, "statistical",
              "one-sided 95% upper bound on the slope is <= 0");
    return rep;
}

ExperimentReport seniority_stat(const Contest& contest, const std::vector<ContestTrace>& traces,
                                int x, const std::vector<double>& times, long min_mass) {
    ExperimentReport rep;
    rep.id = "seniority";
    rep.replications = long(traces.size());
    rep.delta = contest.config.step;
    rep.add("type_state", x);
    struct Row {
        double t;
        McEstimate p, residual;
    };
    std::vector<Row> rows;
    for (double tt : times) {
        const long s = std::lround(tt / contest.config.step);
        long mass = 0, won = 0;
        std::vector<double> residual;
        for (const auto& tr : traces) {
            if (s >= long(tr.events.size())) continue;
            const TraceEvent& e = tr.events[s]; // one event per step
            if ((e.action != 'd' && e.action != 'p') || e.pre.x != x) continue;
            mass++;
            if (tr.outcome != Outcome::promoted) continue;
            won += tr.winner == e.worker;
            residual.push_back(double(tr.end_step - s) * contest.config.step);
        }
        const std::string tag = "t=" + fmt(tt);
        rep.add(tag + ".mass", double(mass));
        if (mass < min_mass) {
            rep.inconclusive = true;
            rep.notes.push_back(tag + ": only " + std::to_string(mass) + " traces at the type");
            continue;
        }
        Row r{tt, proportion(won, mass), mean_se(residual)};
        rep.add(tag + ".promotion_probability", r.p.mean, r.p.se, r.p.n, "statistical");
        rep.add(tag + ".residual_time", r.residual.mean, r.residual.se, r.residual.n,
                "statistical");
        rows.push_back(r);
    }
    bool prob_up = true, time_down = true;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double dp = rows[k].p.mean - rows[k - 1].p.mean;
        const double sp = std::hypot(rows[k].p.se, rows[k - 1].p.se);
        prob_up = prob_up && dp >= -2 * sp;
        if (rows[k].residual.n > 1 && rows[k - 1].residual.n > 1) {
            const double dt = rows[k].residual.mean - rows[k - 1].residual.mean;
            const double st = std::hypot(rows[k].residual.se, rows[k - 1].residual.se);
            time_down = time_down && dt <= 2 * st;
        }
    }
    rep.check("promotion_probability_nondecreasing", prob_up, "statistical", "within 2 SE");
    rep.check("residual_time_nonincreasing", time_down, "statistical", "within 2 SE");
    return rep;
}

ExperimentReport convex_compensation(const CompensationConfig& cfg, std::uint64_t seed,
                                     int threads) {
    if (cfg.prizes.size() < 2) throw ConfigError("convex compensation needs at least 2 prizes");
    for (std::size_t k = 1; k < cfg.prizes.size(); ++k)
        if (cfg.prizes[k] < cfg.prizes[k - 1]) throw ConfigError("prizes must be ascending");

    ExperimentReport rep;
    rep.id = "convexcomp";
    rep.seed = seed;
    rep.replications = cfg.replications;
    rep.delta = cfg.contest.step;

    auto with = [&](double g, double stakes) {
        ContestConfig c = cfg.contest;
        for (auto& w : c.workers) {
            w.prize = g;
            w.pi = stakes * w.pi;
        }
        return prepare_contest(c);
    };

    std::vector<double> value, value_tilde;
    std::vector<std::vector<double>> times;
    std::vector<Contest> contests;
    for (double g : cfg.prizes) {
        contests.push_back(with(g, 1.0));
        value.push_back(evaluate_exact(contests.back(), index_policy()).principal);
        value_tilde.push_back(evaluate_exact(with(g, cfg.stakes), index_policy()).principal);
        std::vector<ContestTrace> tr;
        simulate(contests.back(), cfg.replications, seed, threads, {}, &tr);
        std::vector<double> t;
        for (const auto& x : tr)
            t.push_back(x.outcome == Outcome::promoted ? double(x.end_step) * cfg.contest.step
                                                       : std::numeric_limits<double>::infinity());
        std::sort(t.begin(), t.end());
        times.push_back(std::move(t));
        rep.add("g=" + fmt(g) + ".value", value.back());
        rep.add("g=" + fmt(g) + ".value_stakes", value_tilde.back());
    }

    bool value_up = true, thr_up = true, dominance = true;
    double worst_ks = 0;
    for (std::size_t k = 1; k < cfg.prizes.size(); ++k) {
        value_up = value_up && value[k] >= value[k - 1] - 1e-9;
        for (int i = 0; i < contests[k].size(); ++i) {
            const auto& a = contests[k - 1].models[i]->threshold;
            const auto& b = contests[k].models[i]->threshold;
            for (std::size_t m = 0; m < a.size(); ++m) thr_up = thr_up && b[m] >= a[m];
        }
        // empirical CDF of the larger prize may exceed the smaller one's only by noise
        const auto& lo = times[k - 1];
        const auto& hi = times[k];
        const double band = 1.6276 * std::sqrt(2.0 / double(cfg.replications));
        std::vector<double> pts = lo;
        pts.insert(pts.end(), hi.begin(), hi.end());
        for (double p : pts) {
            if (std::isinf(p)) continue;
            const double Flo = double(std::upper_bound(lo.begin(), lo.end(), p) - lo.begin()) /
                               double(lo.size());
            const double Fhi = double(std::upper_bound(hi.begin(), hi.end(), p) - hi.begin()) /
                               double(hi.size());
            worst_ks = std::max(worst_ks, Fhi - Flo);
        }
        dominance = dominance && worst_ks <= band;
    }
    rep.add("max_cdf_excess", worst_ks, 0, cfg.replications, "statistical");
    rep.check("value_nondecreasing_in_prize", value_up);
    rep.check("threshold_nondecreasing_in_prize", thr_up);
    rep.check("promotion_time_stochastically_larger", dominance, "statistical",
              "one-sided two-sample KS band at 1%");
    const double lhs = value_tilde.back() - value.back();
    const double rhs = value_tilde.front() - value.front();
    rep.add("supermodularity_gap", lhs - rhs);
    rep.check("supermodular_in_prize_and_stakes", lhs >= rhs - 1e-8);
    return rep;
}

} // namespace promo
