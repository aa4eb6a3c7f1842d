#ifndef PROMO_WORKER_HPP
#define PROMO_WORKER_HPP

#include <string>
#include <vector>

#include "promo/linalg.hpp"
#include "promo/typeproc.hpp"

namespace promo {

struct WorkerSpec {
    TypeChain chain;
    Vec pi;          // principal's flow payoff per state, nondecreasing
    Vec cost;        // worker's flow effort cost per state, nonincreasing
    double prize = 1.0;
    double discount = 0.1;
    int initial = 0; // starting grid state

    Discount disc() const { return step_discount(discount, chain.step()); }
};

/// Problems with a spec beyond the chain itself (sizes, monotone payoffs).
std::vector<std::string> check_spec(const WorkerSpec& spec);

constexpr double kParticipationTol = 1e-9;

/// Threshold value meaning "never promote": one past the top of the grid.
inline int never_promote(const WorkerSpec& spec) { return spec.chain.size(); }

/**
 * Worker's expected discounted utility from state x when he exerts effort
 * until the type reaches x_hi or above (prize g) or falls to x_lo or below
 * (nothing). x_lo = -1 removes the lower exit; x_hi = size() removes the
 * upper one.
 */
double continuation_value(const WorkerSpec& spec, int x, int x_lo, int x_hi);

/// continuation_value for every state of the grid (exit states included).
Vec continuation_values(const WorkerSpec& spec, int x_lo, int x_hi);

/**
 * Largest promotion target x_hi > m such that a worker standing at his
 * running minimum m, dismissed as soon as his type falls strictly below m,
 * still accepts; never_promote(spec) when even the absence of a prize is
 * acceptable, m itself when no target works.
 */
int promotion_threshold(const WorkerSpec& spec, int m);
std::vector<int> promotion_thresholds(const WorkerSpec& spec);

/// r times the discounted value of delegating to the worker forever: the
/// flow-equivalent payoff of promoting at x.
double perpetuity_value(const WorkerSpec& spec, int x);
Vec perpetuity_values(const WorkerSpec& spec);

/// Immutable per-spec cache shared by the index, contract and engine code.
struct WorkerModel {
    explicit WorkerModel(WorkerSpec s);

    WorkerSpec spec;
    Discount disc;
    Vec pibar;              // flow-equivalent perpetuity per state
    Vec perp;               // lump perpetuity, pibar / r
    std::vector<int> threshold;

    int size() const { return spec.chain.size(); }
    bool promotes(int x, int m) const { return x >= threshold[m]; }
};

} // namespace promo

#endif // PROMO_WORKER_HPP
