#include "promo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "promo/errors.hpp"

namespace promo {

namespace {

bool same_spec(const WorkerSpec& a, const WorkerSpec& b) {
    const TypeChain& ca = a.chain;
    const TypeChain& cb = b.chain;
    return ca.size() == cb.size() && ca.grid() == cb.grid() && ca.kernel() == cb.kernel() &&
           ca.step() == cb.step() && a.pi == b.pi && a.cost == b.cost && a.prize == b.prize &&
           a.discount == b.discount && a.initial == b.initial;
}

} // namespace

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::promoted: return "promoted";
    case Outcome::outside_option: return "outside_option";
    default: return "capped";
    }
}

long Contest::step_cap() const {
    return long(std::ceil(config.horizon_cap / config.step - 1e-9));
}

Contest prepare_contest(const ContestConfig& config, const IndexOptions& opt,
                        const TableProvider& tables) {
    Contest c;
    c.config = config;
    const int n = int(config.workers.size());
    if (n == 0) throw ConfigError("contest needs at least one worker");
    if (config.outside_option < 0) throw ConfigError("outside option must be nonnegative");
    if (!(config.horizon_cap > 0)) throw ConfigError("horizon_cap must be positive");

    const double r = config.workers[0].discount;
    for (int i = 0; i < n; ++i) {
        const WorkerSpec& w = config.workers[i];
        if (w.discount != r) throw ConfigError("all workers must share the discount rate");
        if (std::abs(w.chain.step() - config.step) > 1e-15 * config.step)
            throw ConfigError("worker " + std::to_string(i) + " chain step differs from config step");
        const auto v = validate(w.chain);
        if (!v.empty())
            throw ConfigError("worker " + std::to_string(i) + " chain: " + v.front().message);
    }

    std::vector<int> order = config.priority;
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    }
    std::vector<int> seen(n, 0);
    if (int(order.size()) != n) throw ConfigError("priority must list every worker once");
    for (int i : order) {
        if (i < 0 || i >= n || seen[i]++) throw ConfigError("priority must be a permutation");
    }
    c.rank.assign(n, 0);
    for (int k = 0; k < n; ++k) c.rank[order[k]] = k;

    if (std::exp(-r * config.horizon_cap) >= 1e-9)
        c.warnings.push_back("horizon_cap leaves discount weight above 1e-9");

    for (int i = 0; i < n; ++i) {
        int twin = -1;
        for (int j = 0; j < i; ++j)
            if (same_spec(config.workers[i], config.workers[j])) twin = j;
        if (twin >= 0) {
            c.models.push_back(c.models[twin]);
            c.tables.push_back(c.tables[twin]);
            continue;
        }
        auto model = std::make_shared<const WorkerModel>(config.workers[i]);
        c.tables.push_back(tables ? tables(*model)
                                  : std::make_shared<const IndexTable>(strategic_index(*model, {}, opt)));
        c.models.push_back(model);
    }
    return c;
}

PolicyAction index_rule(const PolicyInput& in) {
    const Contest& c = in.contest;
    const int n = int(in.arms.size());
    auto better = [&](int i, int j) {
        if (j < 0) return true;
        if (in.arms[i].env != in.arms[j].env) return in.arms[i].env > in.arms[j].env;
        return c.rank[i] < c.rank[j];
    };
    // A worker who climbed to his target is promoted at once. A worker whose
    // threshold collapsed onto a new minimum is only an arm with constant
    // index perp(x): he is promoted when that index is the best one.
    int climbed = -1, best = -1;
    for (int i = 0; i < n; ++i) {
        const auto& aug = c.tables[i]->aug;
        const AugState s = aug.state(in.arms[i].id);
        if (aug.promoted(in.arms[i].id) && s.x > s.m && better(i, climbed)) climbed = i;
        if (better(i, best)) best = i;
    }
    if (climbed >= 0) return {PolicyAction::promote, climbed, in.memory};
    if (in.arms[best].env <= c.W()) return {PolicyAction::outside, -1, in.memory};
    if (c.tables[best]->aug.promoted(in.arms[best].id))
        return {PolicyAction::promote, best, in.memory};
    return {PolicyAction::delegate, best, in.memory};
}

Policy index_policy() { return index_rule; }

namespace {

double max_env(const std::vector<ArmView>& arms, double W) {
    double m = W;
    for (const auto& a : arms) m = std::max(m, a.env);
    return m;
}

} // namespace

namespace {

ContestTrace run_impl(const Contest& contest, const Policy& policy, Rng& rng,
                      const RunOptions& opt, bool check_rule) {
    const int n = contest.size();
    const double W = contest.W();
    const Discount& d = contest.models[0]->disc;
    const long cap = contest.step_cap();

    ContestTrace tr;
    tr.worker_payoffs.assign(n, 0.0);
    tr.effort.assign(n, 0);
    std::vector<ArmView> arms(n);
    for (int i = 0; i < n; ++i) {
        const int x0 = contest.models[i]->spec.initial;
        arms[i].id = contest.tables[i]->aug.id(x0, x0);
        arms[i].env = contest.index(i, arms[i].id);
    }
    if (opt.record) {
        tr.index_paths.resize(n);
        tr.threshold_paths.resize(n);
        for (int i = 0; i < n; ++i) {
            tr.index_paths[i].push_back(contest.index(i, arms[i].id));
            const AugState s = contest.tables[i]->aug.state(arms[i].id);
            tr.threshold_paths[i].push_back(contest.models[i]->threshold[s.m]);
        }
    }

    int memory = 0;
    double df = 1.0;
    long t = 0;
    for (;; ++t) {
        if (t >= cap) {
            tr.outcome = Outcome::capped;
            break;
        }
        const PolicyAction act = policy(PolicyInput{contest, arms, t, memory});
        const double top = max_env(arms, W);
        if (act.kind == PolicyAction::outside) {
            tr.principal_payoff += df * W;
            tr.envelope_payoff += df * top;
            tr.outcome = Outcome::outside_option;
            if (opt.record) tr.events.push_back({t, -1, {-1, -1}, {-1, -1}, top, 'o'});
            break;
        }
        const int i = act.worker;
        if (i < 0 || i >= n) throw PolicyError("policy chose an invalid worker");
        const WorkerModel& M = *contest.models[i];
        const IndexTable& T = *contest.tables[i];
        const AugState pre = T.aug.state(arms[i].id);

        if (act.kind == PolicyAction::promote) {
            tr.principal_payoff += df * M.perp(pre.x);
            tr.worker_payoffs[i] += df * M.spec.prize;
            arms[i].env = std::min(arms[i].env, M.perp(pre.x));
            tr.envelope_payoff += df * max_env(arms, W);
            tr.outcome = Outcome::promoted;
            tr.winner = i;
            tr.promoted_at = pre;
            if (opt.record) tr.events.push_back({t, i, pre, pre, arms[i].env, 'p'});
            break;
        }

        if (check_rule && arms[i].env < top) tr.invariant_ok = false;
        tr.principal_payoff += df * M.spec.pi(pre.x) * d.weight;
        tr.worker_payoffs[i] -= df * M.spec.cost(pre.x) * d.weight;
        tr.envelope_payoff += df * d.weight * d.r * top;

        const int y = M.spec.chain.successor(pre.x, rng.uniform());
        const int next = T.aug.advance(arms[i].id, y);
        if (next < 0) throw PolicyError("policy drove a worker outside the tabulated states");
        const double before = arms[i].env;
        arms[i].id = next;
        arms[i].env = std::min(arms[i].env, contest.index(i, next));
        tr.effort[i]++;
        memory = act.memory;
        df *= d.beta;
        if (opt.record) {
            const AugState post = T.aug.state(next);
            tr.events.push_back({t, i, pre, post, before, 'd'});
            tr.delegations.push_back(i);
            tr.index_paths[i].push_back(contest.index(i, next));
            tr.threshold_paths[i].push_back(M.threshold[post.m]);
        }
    }
    tr.end_step = t;
    if (tr.outcome == Outcome::capped && opt.record)
        tr.events.push_back({t, -1, {-1, -1}, {-1, -1}, max_env(arms, W), 'c'});
    return tr;
}

} // namespace

ContestTrace run_policy(const Contest& contest, const Policy& policy, Rng& rng,
                        const RunOptions& opt) {
    return run_impl(contest, policy, rng, opt, false);
}

ContestTrace run_index_contest(const Contest& contest, Rng& rng, const RunOptions& opt) {
    return run_impl(contest, index_rule, rng, opt, opt.check_index_rule);
}

namespace {

struct ProductState {
    std::vector<ArmView> arms;
    int memory;
};

std::string key_of(const ProductState& s) {
    std::string k;
    k.resize(s.arms.size() * (sizeof(int) + sizeof(double)) + sizeof(int));
    char* p = k.data();
    for (const auto& a : s.arms) {
        std::memcpy(p, &a.id, sizeof(int));
        p += sizeof(int);
        std::memcpy(p, &a.env, sizeof(double));
        p += sizeof(double);
    }
    std::memcpy(p, &s.memory, sizeof(int));
    return k;
}

std::string describe(const Contest& c, const ProductState& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.arms.size(); ++i) {
        const AugState a = c.tables[i]->aug.state(s.arms[i].id);
        os << (i ? "; " : "") << "x=" << a.x << " m=" << a.m;
    }
    os << ") memory=" << s.memory;
    return os.str();
}

} // namespace

ProductEvaluation evaluate_exact(const Contest& contest, const Policy& policy, long max_states) {
    const int n = contest.size();
    const double W = contest.W();
    const Discount& d = contest.models[0]->disc;

    std::vector<ProductState> states;
    std::unordered_map<std::string, int> index;
    auto intern = [&](ProductState s) {
        auto [it, fresh] = index.emplace(key_of(s), int(states.size()));
        if (fresh) {
            if (long(states.size()) >= max_states)
                throw SizeError("product chain exceeds " + std::to_string(max_states) +
                                " states; use Monte Carlo mode");
            states.push_back(std::move(s));
        }
        return it->second;
    };

    ProductState root{std::vector<ArmView>(n), 0};
    for (int i = 0; i < n; ++i) {
        const int x0 = contest.models[i]->spec.initial;
        root.arms[i].id = contest.tables[i]->aug.id(x0, x0);
        root.arms[i].env = contest.index(i, root.arms[i].id);
    }
    intern(root);

    // columns: principal, envelope, worker 0..n-1
    std::vector<Triplet> t;
    std::vector<std::vector<double>> rhs;
    for (std::size_t s = 0; s < states.size(); ++s) {
        const ProductState cur = states[s];
        const PolicyAction act = policy(PolicyInput{contest, cur.arms, -1, cur.memory});
        std::vector<double> b(2 + n, 0.0);
        t.emplace_back(int(s), int(s), 1.0);
        const double top = max_env(cur.arms, W);
        if (act.kind == PolicyAction::outside) {
            b[0] = W;
            b[1] = top;
        } else {
            const int i = act.worker;
            if (i < 0 || i >= n) throw PolicyError("policy chose an invalid worker");
            const WorkerModel& M = *contest.models[i];
            const IndexTable& T = *contest.tables[i];
            const AugState a = T.aug.state(cur.arms[i].id);
            if (act.kind == PolicyAction::promote) {
                std::vector<ArmView> after = cur.arms;
                after[i].env = std::min(after[i].env, M.perp(a.x));
                b[0] = M.perp(a.x);
                b[1] = max_env(after, W);
                b[2 + i] = M.spec.prize;
            } else {
                b[0] = M.spec.pi(a.x) * d.weight;
                b[1] = d.weight * d.r * top;
                b[2 + i] = -M.spec.cost(a.x) * d.weight;
                for (const auto& [y, cdf] : M.spec.chain.row(a.x)) {
                    (void)cdf;
                    ProductState nx = cur;
                    nx.memory = act.memory;
                    const int next = T.aug.advance(cur.arms[i].id, y);
                    if (next < 0) throw PolicyError("policy left the tabulated states");
                    nx.arms[i].id = next;
                    nx.arms[i].env = std::min(cur.arms[i].env, contest.index(i, next));
                    const int j = intern(std::move(nx));
                    t.emplace_back(int(s), j, -d.beta * M.spec.chain.kernel()(a.x, y));
                }
            }
        }
        rhs.push_back(std::move(b));
    }

    const int S = int(states.size());
    SpMat A(S, S);
    A.setFromTriplets(t.begin(), t.end());
    Mat B(S, 2 + n);
    for (int s = 0; s < S; ++s)
        for (int k = 0; k < 2 + n; ++k) B(s, k) = rhs[s][k];
    const Mat V = sparse_solve(A, B);

    ProductEvaluation ev;
    ev.states = S;
    ev.principal = V(0, 0);
    ev.envelope = V(0, 1);
    ev.worker.resize(n);
    ev.min_worker.assign(n, 0.0);
    ev.witness.assign(n, "");
    for (int i = 0; i < n; ++i) {
        ev.worker[i] = V(0, 2 + i);
        Eigen::Index arg;
        ev.min_worker[i] = V.col(2 + i).minCoeff(&arg);
        ev.witness[i] = describe(contest, states[arg]);
    }
    return ev;
}

IrReport check_ir(const Contest& contest, const Policy& policy) {
    const ProductEvaluation ev = evaluate_exact(contest, policy);
    IrReport rep;
    rep.states = ev.states;
    rep.per_worker_min = ev.min_worker;
    rep.min_value = 0;
    for (int i = 0; i < contest.size(); ++i) {
        if (rep.worker < 0 || ev.min_worker[i] < rep.min_value) {
            rep.min_value = ev.min_worker[i];
            rep.worker = i;
            rep.witness = ev.witness[i];
        }
    }
    return rep;
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2) {
        for (long k = 0; k < n; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (long k = w; k < n; k += threads) fn(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

McEstimate estimate(const std::vector<double>& v) {
    McEstimate e;
    e.n = long(v.size());
    if (v.empty()) return e;
    double s = 0;
    for (double x : v) s += x;
    e.mean = s / double(v.size());
    double ss = 0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1) / double(v.size())) : 0.0;
    return e;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const double pos = q * double(v.size() - 1);
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

} // namespace

ContestSummary simulate(const Contest& contest, long replications, std::uint64_t seed, int threads,
                        const Policy& policy, std::vector<ContestTrace>* keep,
                        const RunOptions& opt) {
    std::vector<ContestTrace> traces(replications);
    parallel_for(replications, threads, [&](long k) {
        Rng rng = Rng::substream(seed, std::uint64_t(k));
        traces[k] = policy ? run_policy(contest, policy, rng, opt)
                           : run_index_contest(contest, rng, opt);
    });

    const int n = contest.size();
    ContestSummary s;
    s.replications = replications;
    s.promotion_share.assign(n, 0.0);
    std::vector<double> p, e, times;
    std::vector<std::vector<double>> w(n);
    for (const auto& tr : traces) {
        p.push_back(tr.principal_payoff);
        e.push_back(tr.envelope_payoff);
        for (int i = 0; i < n; ++i) w[i].push_back(tr.worker_payoffs[i]);
        if (tr.outcome == Outcome::promoted) {
            s.promotion_share[tr.winner] += 1;
            times.push_back(double(tr.end_step) * contest.config.step);
        } else if (tr.outcome == Outcome::outside_option) {
            s.outside_share += 1;
        } else {
            s.capped++;
        }
        s.invariant_ok = s.invariant_ok && tr.invariant_ok;
    }
    const double R = double(std::max(1L, replications));
    for (auto& v : s.promotion_share) v /= R;
    s.outside_share /= R;
    s.principal = estimate(p);
    s.envelope = estimate(e);
    for (int i = 0; i < n; ++i) s.worker_payoff.push_back(estimate(w[i]));
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) s.time_quantiles.push_back(quantile(times, q));
    if (keep) *keep = std::move(traces);
    return s;
}

double principal_value_envelope(const Contest& contest, EnvelopeMode mode, long replications,
                                int threads) {
    if (mode == EnvelopeMode::exact) return evaluate_exact(contest, index_rule).envelope;
    const long reps = replications > 0 ? replications : contest.config.replications;
    return simulate(contest, reps, contest.config.seed, threads).envelope.mean;
}

TimeChange time_change_construction(const std::vector<std::vector<double>>& paths) {
    const int n = int(paths.size());
    std::vector<long> L(n);
    long total = 0;
    std::vector<double> levels;
    for (int i = 0; i < n; ++i) {
        if (paths[i].empty()) throw std::invalid_argument("index path must be nonempty");
        L[i] = long(paths[i].size()) - 1;
        total += L[i];
        levels.insert(levels.end(), paths[i].begin(), paths[i].end());
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // sigma(i, W, strict): first effort step with index <= W (< W when strict)
    auto sigma = [&](int i, double W, bool strict) {
        for (long k = 0; k <= L[i]; ++k) {
            const double g = paths[i][k];
            if (strict ? g < W : g <= W) return std::min(k, L[i]);
        }
        return L[i];
    };
    auto tau0 = [&](double W) {
        long s = 0;
        for (int i = 0; i < n; ++i) s += sigma(i, W, false);
        return s;
    };

    TimeChange tc;
    tc.clocks.assign(n, std::vector<long>(total + 1, 0));
    for (long t = 0; t <= total; ++t) {
        // N(t): smallest realized level whose total effort fits in t
        double N = -std::numeric_limits<double>::infinity();
        for (double W : levels) {
            if (tau0(W) <= t) {
                N = W;
                break;
            }
        }
        long slack = t - tau0(N);
        for (int i = 0; i < n; ++i) {
            const long base = std::isinf(N) ? L[i] : sigma(i, N, false);
            const long upper = std::isinf(N) ? L[i] : sigma(i, N, true);
            const long extra = std::min(slack, upper - base);
            slack -= extra;
            tc.clocks[i][t] = base + extra;
        }
    }
    for (long t = 0; t < total; ++t) {
        int who = -1;
        for (int i = 0; i < n; ++i)
            if (tc.clocks[i][t + 1] > tc.clocks[i][t]) who = i;
        tc.order.push_back(who);
    }
    return tc;
}

} // namespace promo
