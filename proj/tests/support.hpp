#ifndef PROMO_TEST_SUPPORT_HPP
#define PROMO_TEST_SUPPORT_HPP

#include <algorithm>
#include <functional>
#include <string>

#include "promo/engine.hpp"
#include "promo/io.hpp"
#include "promo/rng.hpp"
#include "promo/typeproc.hpp"
#include "promo/worker.hpp"

namespace promo::test {

inline std::string fixture(const std::string& name) {
    return std::string(PROMO_FIXTURE_DIR) + "/" + name;
}

inline double uniform(Rng& rng, double a, double b) { return a + (b - a) * rng.uniform(); }

/// Random stochastically monotone chain on [0, 1]: kind 0 is birth-death,
/// kind 1 drifts up one cell and jumps down.
inline TypeChain random_chain(int n, int kind, Rng& rng, double step = 1.0) {
    Mat K = Mat::Zero(n, n);
    if (kind == 0) {
        for (int i = 0; i < n; ++i) {
            const double up = i < n - 1 ? uniform(rng, 0.05, 0.45) : 0;
            const double dn = i > 0 ? uniform(rng, 0.0, 0.45) : 0;
            K(i, i) = 1 - up - dn;
            if (i < n - 1) K(i, i + 1) = up;
            if (i > 0) K(i, i - 1) = dn;
        }
        return TypeChain(Vec::LinSpaced(n, 0, 1), K, step, JumpSign::none, Boundary::reflecting,
                         Boundary::reflecting);
    }
    // jump hazards fall with the state and jump targets rise with it, which
    // keeps the rows ordered
    std::vector<double> q(n);
    std::vector<int> target(n, 0);
    for (int i = 0; i < n; ++i) q[i] = uniform(rng, 0.05, 0.4);
    for (int i = 1; i < n; ++i) target[i] = int(rng.below(std::uint64_t(i)));
    std::sort(q.begin(), q.end(), std::greater<>());
    std::sort(target.begin() + 1, target.end());
    for (int i = 1; i < n; ++i) target[i] = std::min(target[i], i - 1);
    for (int i = 0; i < n; ++i) {
        (i < n - 1 ? K(i, i + 1) : K(i, i)) += 1 - q[i];
        K(i, target[i]) += q[i];
    }
    return TypeChain(Vec::LinSpaced(n, 0, 1), K, step, JumpSign::down_only, Boundary::reflecting,
                     Boundary::reflecting);
}

/// Random spec: pi nondecreasing, cost nonincreasing, both on random scales.
inline WorkerSpec random_spec(int n, int kind, Rng& rng, int initial) {
    WorkerSpec s;
    s.chain = random_chain(n, kind, rng);
    s.pi.resize(n);
    s.cost.resize(n);
    for (int i = 0; i < n; ++i) {
        s.pi(i) = uniform(rng, 0, 2);
        s.cost(i) = uniform(rng, 0, 1);
    }
    std::sort(s.pi.data(), s.pi.data() + n);
    std::sort(s.cost.data(), s.cost.data() + n, std::greater<>());
    s.cost *= uniform(rng, 0.02, 0.5);
    s.prize = uniform(rng, 0.5, 2);
    s.discount = 0.1;
    s.initial = initial;
    return s;
}

inline WorkerSpec simple_spec(TypeChain chain, double cost, double prize, int initial) {
    WorkerSpec s;
    s.chain = std::move(chain);
    s.pi = s.chain.grid();
    s.cost = Vec::Constant(s.chain.size(), cost);
    s.prize = prize;
    s.discount = 0.1;
    s.initial = initial;
    return s;
}

} // namespace promo::test

#endif // PROMO_TEST_SUPPORT_HPP
