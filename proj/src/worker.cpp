#include "promo/worker.hpp"

#include <sstream>

#include "promo/errors.hpp"

namespace promo {

std::vector<std::string> check_spec(const WorkerSpec& spec) {
    std::vector<std::string> out;
    const int n = spec.chain.size();
    if (spec.pi.size() != n) out.push_back("pi has the wrong length");
    if (spec.cost.size() != n) out.push_back("cost has the wrong length");
    if (!out.empty()) return out;
    for (int i = 0; i < n; ++i) {
        if (spec.pi(i) < 0) out.push_back("pi is negative at state " + std::to_string(i));
        if (spec.cost(i) < 0) out.push_back("cost is negative at state " + std::to_string(i));
        if (i > 0 && spec.pi(i) < spec.pi(i - 1))
            out.push_back("pi decreases at state " + std::to_string(i));
        if (i > 0 && spec.cost(i) > spec.cost(i - 1))
            out.push_back("cost increases at state " + std::to_string(i));
    }
    if (!(spec.prize > 0)) out.push_back("prize must be positive");
    if (!(spec.discount > 0)) out.push_back("discount must be positive");
    if (spec.initial < 0 || spec.initial >= n) out.push_back("initial state outside the grid");
    return out;
}

Vec continuation_values(const WorkerSpec& spec, int x_lo, int x_hi) {
    const int n = spec.chain.size();
    if (x_lo < -1 || x_hi > n || x_lo >= x_hi)
        throw std::out_of_range("continuation_value: bad corridor");
    const Discount d = spec.disc();
    const Mat& K = spec.chain.kernel();

    Vec U = Vec::Zero(n);
    for (int y = std::max(x_hi, 0); y < n; ++y) U(y) = spec.prize;
    const int first = x_lo + 1;
    const int m = x_hi - first;
    if (m <= 0) return U;

    // interior states first..x_hi-1
    std::vector<Triplet> t;
    Vec b(m);
    for (int a = 0; a < m; ++a) {
        const int x = first + a;
        t.emplace_back(a, a, 1.0);
        b(a) = -spec.cost(x) * d.weight;
        for (const auto& [y, c] : spec.chain.row(x)) {
            (void)c;
            const double p = K(x, y);
            if (y >= x_hi)
                b(a) += d.beta * p * spec.prize;
            else if (y > x_lo)
                t.emplace_back(a, y - first, -d.beta * p);
        }
    }
    SpMat A(m, m);
    A.setFromTriplets(t.begin(), t.end());
    U.segment(first, m) = sparse_solve(A, b);
    return U;
}

double continuation_value(const WorkerSpec& spec, int x, int x_lo, int x_hi) {
    if (x < std::max(x_lo, 0) || x > std::min(x_hi, spec.chain.top()))
        throw std::out_of_range("continuation_value: x outside the corridor");
    return continuation_values(spec, x_lo, x_hi)(x);
}

int promotion_threshold(const WorkerSpec& spec, int m) {
    const int n = spec.chain.size();
    if (m < 0 || m >= n) throw std::out_of_range("promotion_threshold: bad state");
    // scan from the top so ties resolve to the larger target
    for (int hi = n; hi > m; --hi)
        if (continuation_values(spec, m - 1, hi)(m) >= -kParticipationTol) return hi;
    return m;
}

std::vector<int> promotion_thresholds(const WorkerSpec& spec) {
    std::vector<int> P(spec.chain.size());
    for (int m = 0; m < spec.chain.size(); ++m) P[m] = promotion_threshold(spec, m);
    return P;
}

Vec perpetuity_values(const WorkerSpec& spec) {
    const Discount d = spec.disc();
    Vec v = d.r * discounted_resolvent(spec.chain.kernel(), spec.pi * d.weight, d.beta);
    // absorbing states: exact, so a zero payoff gives an index that ties W = 0
    for (int x = 0; x < spec.chain.size(); ++x)
        if (spec.chain.kernel()(x, x) == 1.0) v(x) = spec.pi(x);
    return v;
}

double perpetuity_value(const WorkerSpec& spec, int x) { return perpetuity_values(spec)(x); }

WorkerModel::WorkerModel(WorkerSpec s) : spec(std::move(s)), disc(spec.disc()) {
    auto problems = check_spec(spec);
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid worker spec:";
        for (const auto& p : problems) os << ' ' << p << ';';
        throw ConfigError(os.str());
    }
    pibar = perpetuity_values(spec);
    perp = pibar / disc.r;
    threshold = promotion_thresholds(spec);
}

} // namespace promo
