#ifndef PROMO_ORACLE_HPP
#define PROMO_ORACLE_HPP

#include <string>
#include <vector>

#include "promo/contract.hpp"
#include "promo/engine.hpp"

namespace promo {

/// Max over every continuation set of the discounted reward-to-time ratio,
/// divided by r. Exhaustive in 2^K sets.
double brute_force_gittins(const WorkerSpec& spec, int state, int max_states = 12);

struct ArmPolicyEntry {
    AugState state;
    ArmAction action;
};

struct SingleArmOracle {
    double value = 0;
    std::vector<ArmPolicyEntry> policy; // reachable states of the argmax
    long candidates = 0;
    long feasible = 0;
    bool corridor = false;              // argmax has the quit / threshold corridor form
    std::string structure;              // description of the argmax
};

/**
 * Enumerates every deterministic action assignment (continue, promote, quit)
 * on the augmented states reachable from the initial state, keeps those whose
 * worker value is nonnegative at every continuing state, and returns the best
 * principal value.
 */
SingleArmOracle brute_force_single_arm(const WorkerSpec& spec, double W, int max_states = 7);

/// True when quits happen only at new minima below every continuing minimum
/// and, at each minimum, promoted types lie above every continuing type.
bool has_corridor_structure(const std::vector<ArmPolicyEntry>& policy, std::string* why = nullptr);

struct NamedPolicy {
    std::string name;
    Policy policy;
};

struct CandidateResult {
    std::string name;
    double value = 0;
    double min_worker = 0;
    bool feasible = false;
    std::string witness;
};

struct EnumerationReport {
    std::string family;
    long n_candidates = 0;
    long n_feasible = 0;
    double best_value = 0;
    std::string best_name;
    std::vector<CandidateResult> results;
};

/// Delegation rules x threshold shifts x outside-option rules for a small
/// contest. Every member is Markov in the augmented states plus a counter.
std::vector<NamedPolicy> standard_family(const Contest& contest);

EnumerationReport enumerate_feasible_contests(const Contest& contest,
                                              const std::vector<NamedPolicy>& family,
                                              double ir_tol = 1e-8);

/// Optimal value of the classical bandit with retirement payoff W, by value
/// iteration on the product of the base chains. No promotion exists here.
double bandit_retirement_value(const Contest& contest, long max_states = 200'000);

} // namespace promo

#endif // PROMO_ORACLE_HPP
