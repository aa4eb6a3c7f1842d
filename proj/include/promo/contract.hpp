#ifndef PROMO_CONTRACT_HPP
#define PROMO_CONTRACT_HPP

#include <vector>

#include "promo/index.hpp"

namespace promo {

enum class ArmAction : char { cont, promote, quit };

/// Optimal contract for a single worker against an outside option.
struct SingleArmContract {
    int quit_state = kNeverQuit;    // quit at new minima m <= quit_state
    std::vector<int> threshold;     // promotion target per running minimum
    double principal_value = 0;     // at the worker's initial state
    bool degenerate = false;        // promotes on the first step or at the start
    bool quits_at_start = false;

    AugmentedChain aug;             // shares the index table's allocation
    std::vector<ArmAction> action;  // per augmented state
    Vec principal;                  // per augmented state
    Vec worker;                     // per augmented state

    double worker_value(int x, int m) const;
    double principal_at(int x, int m) const;
};

/// Action of the single-arm contract at an augmented state.
ArmAction contract_action(const WorkerModel& model, const IndexTable& table, int quit_state,
                          int id);

SingleArmContract single_arm_contract(const WorkerModel& model, const IndexTable& table, double W);

} // namespace promo

#endif // PROMO_CONTRACT_HPP
