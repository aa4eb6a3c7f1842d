#include "promo/index.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "promo/errors.hpp"

namespace promo {

AugmentedChain::AugmentedChain(const TypeChain& chain, const std::vector<int>& threshold,
                               const std::vector<AugState>& roots)
    : n_(chain.size()) {
    if (int(threshold.size()) != n_) throw std::invalid_argument("threshold size mismatch");
    lookup_.assign(std::size_t(n_) * n_, -1);
    std::deque<int> queue;
    auto add = [&](int x, int m) {
        int& slot = lookup_[std::size_t(m) * n_ + x];
        if (slot >= 0) return slot;
        slot = int(states_.size());
        states_.push_back({x, m});
        promoted_.push_back(x >= threshold[m]);
        queue.push_back(slot);
        return slot;
    };
    for (const auto& r : roots) {
        if (r.m > r.x || r.x < 0 || r.x >= n_ || r.m < 0)
            throw std::invalid_argument("augmented root must satisfy 0 <= m <= x < size");
        add(r.x, r.m);
    }
    while (!queue.empty()) {
        const int id = queue.front();
        queue.pop_front();
        const AugState s = states_[id];
        for (const auto& [y, c] : chain.row(s.x)) {
            (void)c;
            add(y, std::min(s.m, y));
        }
    }

    std::vector<Triplet> t;
    for (int id = 0; id < size(); ++id) {
        const AugState s = states_[id];
        if (promoted_[id]) {
            t.emplace_back(id, id, 1.0);
            continue;
        }
        for (const auto& [y, c] : chain.row(s.x)) {
            (void)c;
            t.emplace_back(id, lookup_[std::size_t(std::min(s.m, y)) * n_ + y], chain.kernel()(s.x, y));
        }
    }
    kernel_.resize(size(), size());
    kernel_.setFromTriplets(t.begin(), t.end());
}

StoppingSolution solve_stopping(const SpMat& P, const Vec& h, const Discount& d, double W,
                                std::vector<char> warm) {
    const int n = int(P.rows());
    std::vector<char> cont = warm.size() == std::size_t(n) ? std::move(warm)
                                                           : std::vector<char>(n, 0);
    const double eps = 1e-13 * std::max(1.0, std::abs(W));
    const Vec hw = h * d.weight;
    Vec V(n), q(n);
    for (int iter = 0;; ++iter) {
        if (iter > 4 * n + 50) throw NumericalError("stopping policy iteration did not settle");
        std::vector<Triplet> t;
        t.reserve(P.nonZeros() + n);
        Vec b(n);
        for (int s = 0; s < n; ++s) {
            t.emplace_back(s, s, 1.0);
            if (!cont[s]) {
                b(s) = W;
                continue;
            }
            b(s) = hw(s);
            for (SpMat::InnerIterator it(P, s); it; ++it)
                t.emplace_back(s, int(it.col()), -d.beta * it.value());
        }
        SpMat A(n, n);
        A.setFromTriplets(t.begin(), t.end());
        V = sparse_solve(A, b);
        q = hw + d.beta * (P * V);
        bool changed = false;
        for (int s = 0; s < n; ++s) {
            if (!cont[s] && q(s) > W + eps) cont[s] = 1, changed = true;
            else if (cont[s] && q(s) < W - eps) cont[s] = 0, changed = true;
        }
        if (!changed) break;
    }
    StoppingSolution sol;
    sol.cont.resize(n);
    sol.value = V.cwiseMax(W);
    sol.cont_value = q;
    for (int s = 0; s < n; ++s) sol.cont[s] = q(s) > W;
    return sol;
}

double retirement_value(const SpMat& P, const Vec& h, const Discount& d, int state, double W) {
    if (W < 0) throw std::invalid_argument("retirement payoff must be nonnegative");
    return solve_stopping(P, h, d, W).value(state);
}

namespace {

struct Bisection {
    const SpMat& P;
    const Vec& h;
    const Discount& d;
    const IndexOptions& opt;
    Vec out;
    std::vector<double> last_w, last_diff;

    void check_monotone(int s, double W, double diff) {
        if (!std::isnan(last_w[s])) {
            const double slack = 1e-9 * std::max(1.0, std::abs(W));
            if ((W > last_w[s] && diff > last_diff[s] + slack) ||
                (W < last_w[s] && diff < last_diff[s] - slack))
                throw NumericalError("retirement_value - W is not monotone in W at state " +
                                     std::to_string(s));
        }
        last_w[s] = W;
        last_diff[s] = diff;
    }

    // exact ratio for the continuation region found at the leaf's lower end
    void polish(const std::vector<int>& group, double lo, double hi) {
        const StoppingSolution sol = solve_stopping(P, h, d, lo);
        const int n = int(P.rows());
        std::vector<int> pos(n, -1), members;
        for (int s = 0; s < n; ++s)
            if (sol.cont[s]) pos[s] = int(members.size()), members.push_back(s);
        if (members.empty()) {
            for (int s : group) out(s) = lo;
            return;
        }
        const int m = int(members.size());
        std::vector<Triplet> t;
        Mat rhs(m, 2);
        for (int a = 0; a < m; ++a) {
            const int s = members[a];
            t.emplace_back(a, a, 1.0);
            rhs(a, 0) = h(s) * d.weight;
            rhs(a, 1) = d.weight;
            for (SpMat::InnerIterator it(P, s); it; ++it)
                if (pos[it.col()] >= 0) t.emplace_back(a, pos[it.col()], -d.beta * it.value());
        }
        SpMat A(m, m);
        A.setFromTriplets(t.begin(), t.end());
        const Mat ND = sparse_solve(A, rhs);
        for (int s : group) {
            if (pos[s] < 0) {
                out(s) = lo;
                continue;
            }
            const double ratio = ND(pos[s], 0) / (d.r * ND(pos[s], 1));
            out(s) = std::clamp(ratio, lo, hi);
        }
    }

    void run(const std::vector<int>& group, double lo, double hi, int depth,
             const std::vector<char>& warm) {
        if (group.empty()) return;
        if (hi - lo <= opt.tol * std::max(1.0, std::abs(hi)) || depth >= opt.max_iter) {
            polish(group, lo, hi);
            return;
        }
        const double mid = 0.5 * (lo + hi);
        const StoppingSolution sol = solve_stopping(P, h, d, mid, warm);
        std::vector<int> up, down;
        for (int s : group) {
            check_monotone(s, mid, sol.cont_value(s) - mid);
            (sol.cont[s] ? up : down).push_back(s);
        }
        run(down, lo, mid, depth + 1, sol.cont);
        run(up, mid, hi, depth + 1, sol.cont);
    }
};

} // namespace

Vec stream_index(const SpMat& P, const Vec& h, const Discount& d, const IndexOptions& opt) {
    const int n = int(P.rows());
    if (h.size() != n) throw std::invalid_argument("stream_index: flow size mismatch");
    Bisection b{P, h, d, opt, Vec::Zero(n), std::vector<double>(n, std::nan("")),
                std::vector<double>(n, 0.0)};
    // the index is an average of future flows, so it lies between their extremes
    const double lo = h.minCoeff() / d.r;
    const double hi = h.maxCoeff() / d.r;
    std::vector<int> all(n);
    for (int s = 0; s < n; ++s) all[s] = s;
    b.run(all, lo, hi, 0, {});
    return b.out;
}

Vec gittins_index(const WorkerSpec& spec, const IndexOptions& opt) {
    return stream_index(to_sparse(spec.chain.kernel()), spec.pi, spec.disc(), opt);
}

double IndexTable::strategic_at(int x, int m) const {
    const int id = aug.id(x, m);
    if (id < 0)
        throw std::out_of_range("strategic index not tabulated at (" + std::to_string(x) + ", " +
                                std::to_string(m) + ")");
    return strategic(id);
}

IndexTable strategic_index(const WorkerModel& model, const std::vector<AugState>& extra_roots,
                           const IndexOptions& opt) {
    IndexTable t;
    t.tol = opt.tol;
    t.gittins = gittins_index(model.spec, opt);
    std::vector<AugState> roots{{model.spec.initial, model.spec.initial}};
    roots.insert(roots.end(), extra_roots.begin(), extra_roots.end());
    t.aug = AugmentedChain(model.spec.chain, model.threshold, roots);
    t.flow.resize(t.aug.size());
    for (int id = 0; id < t.aug.size(); ++id) {
        const int x = t.aug.state(id).x;
        t.flow(id) = t.aug.promoted(id) ? model.pibar(x) : model.spec.pi(x);
    }
    t.strategic = stream_index(t.aug.kernel(), t.flow, model.disc, opt);
    for (int id = 0; id < t.aug.size(); ++id)
        if (t.aug.promoted(id)) t.strategic(id) = model.perp(t.aug.state(id).x);
    return t;
}

int quit_boundary(const IndexTable& table, double W) {
    if (W < 0) throw std::invalid_argument("outside option must be nonnegative");
    int p = kNeverQuit;
    for (int x = 0; x < table.aug.base_size(); ++x) {
        const int id = table.aug.id(x, x);
        if (id >= 0 && table.strategic(id) <= W) p = x;
    }
    return p;
}

Vec lower_envelope(const Vec& path) {
    if (path.size() == 0) throw std::invalid_argument("lower_envelope: empty path");
    return prefix_min(path);
}

} // namespace promo
