#include "promo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "promo/errors.hpp"

namespace promo {

double brute_force_gittins(const WorkerSpec& spec, int state, int max_states) {
    const int n = spec.chain.size();
    if (n > max_states) throw SizeError("brute_force_gittins: grid too large for enumeration");
    if (state < 0 || state >= n) throw std::out_of_range("brute_force_gittins: bad state");
    const Discount d = spec.disc();
    const Mat& K = spec.chain.kernel();
    double best = -std::numeric_limits<double>::infinity();
    // C is the set of states where the arm keeps running after time 0
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> members;
        for (int s = 0; s < n; ++s)
            if (mask >> s & 1u) members.push_back(s);
        const int m = int(members.size());
        // reward and time accumulated after the first step, from each member
        Vec num = Vec::Zero(n), den = Vec::Zero(n);
        if (m > 0) {
            Mat A = Mat::Identity(m, m);
            Mat b(m, 2);
            for (int a = 0; a < m; ++a) {
                const int s = members[a];
                b(a, 0) = spec.pi(s) * d.weight;
                b(a, 1) = d.weight;
                for (int c = 0; c < m; ++c) A(a, c) -= d.beta * K(s, members[c]);
            }
            const Mat v = A.partialPivLu().solve(b);
            for (int a = 0; a < m; ++a) num(members[a]) = v(a, 0), den(members[a]) = v(a, 1);
        }
        const double N = spec.pi(state) * d.weight + d.beta * K.row(state).dot(num);
        const double D = d.weight + d.beta * K.row(state).dot(den);
        best = std::max(best, N / (d.r * D));
    }
    return best;
}

bool has_corridor_structure(const std::vector<ArmPolicyEntry>& policy, std::string* why) {
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    int max_quit = std::numeric_limits<int>::min();
    int min_open = std::numeric_limits<int>::max();
    for (const auto& e : policy) {
        if (e.action == ArmAction::quit && e.state.x != e.state.m)
            return fail("quits away from a new minimum at (" + std::to_string(e.state.x) + ", " +
                        std::to_string(e.state.m) + ")");
        if (e.state.x != e.state.m) continue;
        if (e.action == ArmAction::quit)
            max_quit = std::max(max_quit, e.state.m);
        else
            min_open = std::min(min_open, e.state.m);
    }
    if (max_quit > min_open) return fail("quit set is not a lower set of minima");
    for (const auto& e : policy) {
        if (e.action != ArmAction::promote) continue;
        for (const auto& f : policy)
            if (f.state.m == e.state.m && f.action == ArmAction::cont && f.state.x > e.state.x)
                return fail("promotes at (" + std::to_string(e.state.x) + ", " +
                            std::to_string(e.state.m) + ") but continues above it");
    }
    if (why) *why = "corridor";
    return true;
}

SingleArmOracle brute_force_single_arm(const WorkerSpec& spec, double W, int max_states) {
    const int n = spec.chain.size();
    if (n > max_states) throw SizeError("brute_force_single_arm: grid too large for enumeration");
    const Discount d = spec.disc();
    const Mat& K = spec.chain.kernel();
    const Vec perp = perpetuity_values(spec) / d.r;
    auto key = [n](int x, int m) { return m * n + x; };

    std::vector<int> action(n * n, -1); // 0 cont, 1 promote, 2 quit
    std::vector<char> queued(n * n, 0);
    std::vector<int> assigned;
    SingleArmOracle out;
    out.value = -std::numeric_limits<double>::infinity();
    const int root = key(spec.initial, spec.initial);

    auto evaluate = [&]() {
        const int S = int(assigned.size());
        std::vector<int> pos(n * n, -1);
        for (int a = 0; a < S; ++a) pos[assigned[a]] = a;
        Mat A = Mat::Identity(S, S);
        Mat b = Mat::Zero(S, 2);
        for (int a = 0; a < S; ++a) {
            const int k = assigned[a];
            const int x = k % n, m = k / n;
            switch (action[k]) {
            case 1: b(a, 0) = perp(x); b(a, 1) = spec.prize; break;
            case 2: b(a, 0) = W; break;
            default:
                b(a, 0) = spec.pi(x) * d.weight;
                b(a, 1) = -spec.cost(x) * d.weight;
                for (int y = 0; y < n; ++y)
                    if (K(x, y) > 0) A(a, pos[key(y, std::min(m, y))]) -= d.beta * K(x, y);
            }
        }
        const Mat v = A.partialPivLu().solve(b);
        out.candidates++;
        for (int a = 0; a < S; ++a)
            if (action[assigned[a]] == 0 && v(a, 1) < -kParticipationTol) return;
        out.feasible++;
        const double val = v(pos[root], 0);
        const bool better = val > out.value + 1e-10;
        const bool tie = std::abs(val - out.value) <= 1e-10;
        if (!better && !(tie && !out.corridor)) return;
        std::vector<ArmPolicyEntry> pol;
        for (int k : assigned) pol.push_back({{k % n, k / n}, ArmAction(action[k])});
        const bool corridor = has_corridor_structure(pol);
        if (tie && !corridor) return;
        out.value = better ? val : std::max(val, out.value);
        out.policy = std::move(pol);
        out.corridor = corridor;
    };

    std::function<void(std::vector<int>)> rec = [&](std::vector<int> frontier) {
        if (frontier.empty()) {
            evaluate();
            return;
        }
        const int k = frontier.back();
        frontier.pop_back();
        assigned.push_back(k);
        for (int a = 0; a < 3; ++a) {
            action[k] = a;
            std::vector<int> next = frontier;
            std::vector<int> added;
            if (a == 0) {
                const int x = k % n, m = k / n;
                for (int y = 0; y < n; ++y) {
                    if (K(x, y) <= 0) continue;
                    const int j = key(y, std::min(m, y));
                    if (action[j] < 0 && !queued[j]) {
                        queued[j] = 1;
                        added.push_back(j);
                        next.push_back(j);
                    }
                }
            }
            rec(next);
            for (int j : added) queued[j] = 0;
        }
        action[k] = -1;
        assigned.pop_back();
    };
    queued[root] = 1;
    rec({root});

    std::sort(out.policy.begin(), out.policy.end(), [](const auto& a, const auto& b) {
        return a.state.m != b.state.m ? a.state.m < b.state.m : a.state.x < b.state.x;
    });
    has_corridor_structure(out.policy, &out.structure);
    return out;
}

namespace {

enum class Delegation { index, index_reversed, static_order, by_type, switcher };

struct FamilyMember {
    Delegation rule;
    std::vector<int> order; // static order
    int k = 1;              // switch period
    std::vector<int> shift; // per-worker threshold shift
    bool may_quit = true;
};

int shifted_threshold(const WorkerModel& M, int m, int s) {
    const int never = M.size();
    const int base = M.threshold[m];
    if (base >= never && s >= 0) return never;
    return std::clamp(base + s, m, never);
}

PolicyAction run_member(const FamilyMember& f, const PolicyInput& in) {
    const Contest& c = in.contest;
    const int n = int(in.arms.size());
    const double W = c.W();

    // same promotion convention as the index rule: climbing to the target
    // promotes at once, a collapsed threshold at a new minimum only when chosen
    auto at_target = [&](int i) {
        const AugState s = c.tables[i]->aug.state(in.arms[i].id);
        return s.x >= shifted_threshold(*c.models[i], s.m, f.shift[i]);
    };
    for (int r = 0; r < n; ++r) {
        int i = -1;
        for (int j = 0; j < n; ++j)
            if (c.rank[j] == r) i = j;
        const AugState s = c.tables[i]->aug.state(in.arms[i].id);
        if (s.x > s.m && at_target(i)) return {PolicyAction::promote, i, in.memory};
    }

    std::vector<char> active(n, 1);
    bool any = false;
    for (int i = 0; i < n; ++i) {
        if (f.may_quit) active[i] = in.arms[i].env > W;
        any = any || active[i];
    }
    if (!any) {
        if (f.may_quit) return {PolicyAction::outside, -1, in.memory};
        std::fill(active.begin(), active.end(), 1);
    }

    auto pick_max = [&](auto score, bool reversed) {
        int best = -1;
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            if (best < 0) {
                best = i;
                continue;
            }
            const double a = score(i), b = score(best);
            const bool tie_win = reversed ? c.rank[i] > c.rank[best] : c.rank[i] < c.rank[best];
            if (a > b || (a == b && tie_win)) best = i;
        }
        return best;
    };

    int who = -1;
    int memory = in.memory;
    switch (f.rule) {
    case Delegation::index:
        who = pick_max([&](int i) { return in.arms[i].env; }, false);
        break;
    case Delegation::index_reversed:
        who = pick_max([&](int i) { return in.arms[i].env; }, true);
        break;
    case Delegation::by_type:
        who = pick_max([&](int i) { return double(c.tables[i]->aug.state(in.arms[i].id).x); },
                       false);
        break;
    case Delegation::static_order:
        for (int i : f.order)
            if (active[i]) {
                who = i;
                break;
            }
        break;
    case Delegation::switcher: {
        // memory = current worker * (k + 1) + steps spent on him
        int cur = memory / (f.k + 1), used = memory % (f.k + 1);
        if (!active[cur] || used >= f.k) {
            for (int step = 1; step <= n; ++step) {
                const int j = (cur + step) % n;
                if (active[j]) {
                    cur = j;
                    break;
                }
            }
            used = 0;
        }
        if (!active[cur]) cur = pick_max([&](int i) { return in.arms[i].env; }, false);
        who = cur;
        memory = cur * (f.k + 1) + used + 1;
        break;
    }
    }
    if (at_target(who)) return {PolicyAction::promote, who, in.memory};
    return {PolicyAction::delegate, who, memory};
}

std::string member_name(const FamilyMember& f) {
    std::ostringstream os;
    switch (f.rule) {
    case Delegation::index: os << "index"; break;
    case Delegation::index_reversed: os << "index-reversed-ties"; break;
    case Delegation::by_type: os << "highest-type"; break;
    case Delegation::static_order:
        os << "static";
        for (int i : f.order) os << '-' << i;
        break;
    case Delegation::switcher: os << "switch-every-" << f.k; break;
    }
    os << " shift";
    for (int s : f.shift) os << (s >= 0 ? "+" : "") << s;
    os << (f.may_quit ? " quit-at-W" : " never-quit");
    return os.str();
}

} // namespace

std::vector<NamedPolicy> standard_family(const Contest& contest) {
    const int n = contest.size();
    std::vector<FamilyMember> rules;
    rules.push_back({Delegation::index, {}, 1, {}, true});
    rules.push_back({Delegation::index_reversed, {}, 1, {}, true});
    rules.push_back({Delegation::by_type, {}, 1, {}, true});
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    do {
        rules.push_back({Delegation::static_order, order, 1, {}, true});
    } while (std::next_permutation(order.begin(), order.end()));
    for (int k : {1, 2, 3, 4, 5, 6, 8, 10}) rules.push_back({Delegation::switcher, {}, k, {}, true});

    const std::vector<int> shifts{-4, -3, -2, -1, 0, 1};
    std::vector<std::vector<int>> combos{{}};
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& c : combos)
            for (int s : shifts) {
                auto v = c;
                v.push_back(s);
                next.push_back(v);
            }
        combos = std::move(next);
    }

    std::vector<NamedPolicy> family;
    for (const auto& base : rules)
        for (const auto& sh : combos)
            for (bool quit : {true, false}) {
                FamilyMember f = base;
                f.shift = sh;
                f.may_quit = quit;
                family.push_back({member_name(f),
                                  [f](const PolicyInput& in) { return run_member(f, in); }});
            }
    return family;
}

EnumerationReport enumerate_feasible_contests(const Contest& contest,
                                              const std::vector<NamedPolicy>& family,
                                              double ir_tol) {
    EnumerationReport rep;
    rep.family = "standard";
    rep.best_value = -std::numeric_limits<double>::infinity();
    for (const auto& p : family) {
        const ProductEvaluation ev = evaluate_exact(contest, p.policy);
        CandidateResult r;
        r.name = p.name;
        r.value = ev.principal;
        r.min_worker = *std::min_element(ev.min_worker.begin(), ev.min_worker.end());
        r.feasible = r.min_worker >= -ir_tol;
        for (std::size_t i = 0; i < ev.min_worker.size(); ++i)
            if (ev.min_worker[i] == r.min_worker) r.witness = ev.witness[i];
        rep.n_candidates++;
        if (r.feasible) {
            rep.n_feasible++;
            if (r.value > rep.best_value) {
                rep.best_value = r.value;
                rep.best_name = r.name;
            }
        }
        rep.results.push_back(std::move(r));
    }
    return rep;
}

double bandit_retirement_value(const Contest& contest, long max_states) {
    const int n = contest.size();
    std::vector<long> stride(n);
    long total = 1;
    for (int i = 0; i < n; ++i) {
        stride[i] = total;
        total *= contest.models[i]->size();
        if (total > max_states)
            throw SizeError("product chain exceeds " + std::to_string(max_states) + " states");
    }
    const Discount& d = contest.models[0]->disc;
    const double W = contest.W();
    Vec V = Vec::Constant(total, W), next(total);
    std::vector<int> x(n);
    for (int it = 0; it < 100000; ++it) {
        for (long s = 0; s < total; ++s) {
            long rest = s;
            for (int i = 0; i < n; ++i) {
                x[i] = int(rest % contest.models[i]->size());
                rest /= contest.models[i]->size();
            }
            double best = W;
            for (int i = 0; i < n; ++i) {
                const WorkerModel& M = *contest.models[i];
                double ev = 0;
                for (const auto& entry : M.spec.chain.row(x[i])) {
                    const int y = entry.first;
                    ev += M.spec.chain.kernel()(x[i], y) * V(s + (y - x[i]) * stride[i]);
                }
                best = std::max(best, M.spec.pi(x[i]) * d.weight + d.beta * ev);
            }
            next(s) = best;
        }
        const double diff = (next - V).cwiseAbs().maxCoeff();
        V.swap(next);
        if (diff <= 1e-15 * std::max(1.0, V.cwiseAbs().maxCoeff())) break;
    }
    long root = 0;
    for (int i = 0; i < n; ++i) root += contest.models[i]->spec.initial * stride[i];
    return V(root);
}

} // namespace promo
