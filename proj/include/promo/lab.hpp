#ifndef PROMO_LAB_HPP
#define PROMO_LAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "promo/engine.hpp"

namespace promo {

struct Statistic {
    std::string name;
    double value = 0;
    double se = 0;      // 0 for exact or closed-form values
    long n = 0;         // replications behind the value, 0 when exact
    std::string kind;   // exact, closed_form, statistical
};

struct Claim {
    std::string name;
    bool pass = false;
    std::string kind;   // exact or statistical
    std::string detail;
};

struct ExperimentReport {
    std::string id;
    std::string config_hash;
    std::uint64_t seed = 0;
    long replications = 0;
    double delta = 0;
    std::vector<Statistic> stats;
    std::vector<Claim> claims;
    std::vector<std::string> notes;
    bool inconclusive = false;

    bool ok() const;
    const Statistic* stat(const std::string& name) const;
    const Claim* claim(const std::string& name) const;
    void add(const std::string& name, double value, double se = 0, long n = 0,
             const std::string& kind = "exact");
    void check(const std::string& name, bool pass, const std::string& kind = "exact",
               const std::string& detail = "");
};

// Closed forms behind the ladder example.

/// Root of lam c \int_0^t e^{-(r+lam)s} ds = g.
double tbar(double lam, double c, double g, double r);
/// Same root by composite Simpson quadrature and bisection.
double tbar_quadrature(double lam, double c, double g, double r);
/// Climb time at which a worker dismissed on his first dead end breaks even:
/// c (1 - e^{-(r+lam)t}) / (r+lam) = g e^{-(r+lam)t}.
double climb_time_break_even(double lam, double c, double g, double r);
/// P(no dead end during t) = e^{-lam t}.
double no_dead_end_probability(double lam, double t);

/// Promotion shares of two ladder workers who each succeed a trial with
/// probability d and whose ties go to worker 0: {1 - (1-d)d, (1-d)d}.
std::vector<double> two_worker_shares(double d);
/// Upper bound on a non-leading worker's promotion probability.
double reinforcing_bound(double d, int leaders);

/// Probability that a walk with per-step up/down probabilities (and holding
/// the rest) started at `start` hits `hi` before `lo`.
double gamblers_ruin(double up, double down, int start, int lo, int hi);

// Experiments.

struct TrialEstimate {
    int worker = -1;
    int start = 0, target = 0;
    McEstimate success;
};

/// Monte Carlo probability that each initially index-maximal worker reaches
/// threshold(x0) before his type falls below x0.
std::vector<TrialEstimate> first_trial_success(const Contest& contest, long replications,
                                               std::uint64_t seed, int threads);

ExperimentReport reinforcing_check(const Contest& contest, double delta, long replications,
                                   std::uint64_t seed, int threads);

/// Probability that a path of `chain` from `start` reaches `target` before
/// visiting a state below `start` (cut at `cap` steps).
McEstimate reach_before_drop(const TypeChain& chain, int start, int target, long replications,
                             std::uint64_t seed, int threads, long cap = 10'000'000);

/// Exact value of the same probability by a first-passage linear solve.
double exact_reach_probability(const TypeChain& chain, int start, int target);

ExperimentReport tbar_experiment(double lam, double c, double g, double r, double mu,
                                 double delta, long replications, std::uint64_t seed,
                                 int threads);

struct GapConfig {
    ContestConfig contest;           // workers [0, advantaged) form group A
    int advantaged = 1;
    bool randomize_priority = false; // fresh uniform priority order per replication
    bool decomposition = false;      // compare with the first / second trial shares
};

ExperimentReport promotion_gap_experiment(const GapConfig& cfg, long replications,
                                          std::uint64_t seed, int threads);

ExperimentReport fast_track_stat(const Contest& contest, const std::vector<ContestTrace>& traces);

/// Given that the worker chosen after `times[k]` units of elapsed time stands
/// at type state x: his promotion probability and the residual time to the
/// contest's promotion (traces must be recorded).
ExperimentReport seniority_stat(const Contest& contest, const std::vector<ContestTrace>& traces,
                                int x, const std::vector<double>& times, long min_mass = 30);

struct CompensationConfig {
    ContestConfig contest;
    std::vector<double> prizes;      // ascending, applied to every worker
    double stakes = 2.0;             // pi tilde = stakes * pi
    long replications = 20000;       // for the promotion-time dominance check
};

ExperimentReport convex_compensation(const CompensationConfig& cfg, std::uint64_t seed,
                                     int threads);

} // namespace promo

#endif // PROMO_LAB_HPP
