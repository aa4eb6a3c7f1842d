#ifndef PROMO_ENGINE_HPP
#define PROMO_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "promo/contract.hpp"
#include "promo/index.hpp"
#include "promo/rng.hpp"

namespace promo {

struct ContestConfig {
    std::vector<WorkerSpec> workers;
    double outside_option = 0;
    std::vector<int> priority;   // most preferred first; empty means ascending id
    double step = 1.0;
    double horizon_cap = 1000;   // effort time after which a trace is cut
    long replications = 1000;
    std::uint64_t seed = 1;
};

/// Config plus per-worker models and index tables, immutable once built.
struct Contest {
    ContestConfig config;
    std::vector<std::shared_ptr<const WorkerModel>> models;
    std::vector<std::shared_ptr<const IndexTable>> tables;
    std::vector<int> rank;       // rank[i]: position of worker i in the priority order
    std::vector<std::string> warnings;

    int size() const { return int(models.size()); }
    double W() const { return config.outside_option; }
    long step_cap() const;
    /// Worker i's index at augmented state id.
    double index(int i, int id) const { return tables[i]->strategic(id); }
};

/// Source of index tables, e.g. a disk cache; must return the same table
/// strategic_index would build.
using TableProvider = std::function<std::shared_ptr<const IndexTable>(const WorkerModel&)>;

/**
 * Validates the config, builds models and index tables. Identical worker
 * specs share one table, so symmetric workers carry bit-identical indices.
 */
Contest prepare_contest(const ContestConfig& config, const IndexOptions& opt = {},
                        const TableProvider& tables = {});

/// Per-worker state seen by a delegation policy.
struct ArmView {
    int id;      // augmented state id in the worker's table
    double env;  // running minimum of the worker's strategic index
};

struct PolicyInput {
    const Contest& contest;
    std::span<const ArmView> arms;
    long step;   // global step; Markov policies must ignore it
    int memory;  // policy-owned counter, 0 at the start
};

struct PolicyAction {
    enum Kind : char { delegate, promote, outside } kind = delegate;
    int worker = -1;
    int memory = 0;
};

using Policy = std::function<PolicyAction(const PolicyInput&)>;

/// The index contest: promote on reaching the threshold, take the outside
/// option once every envelope is at or below W, otherwise delegate to the
/// largest envelope with ties broken by priority.
PolicyAction index_rule(const PolicyInput& in);
Policy index_policy();

struct TraceEvent {
    long t;
    int worker;
    AugState pre, post;
    double index; // delegated worker's envelope before the step
    char action;  // 'd' delegate, 'p' promote, 'o' outside, 'c' capped
};

enum class Outcome { promoted, outside_option, capped };
const char* to_string(Outcome o);

struct ContestTrace {
    std::vector<TraceEvent> events;  // filled only when recording
    Outcome outcome = Outcome::capped;
    int winner = -1;
    long end_step = 0;
    AugState promoted_at{-1, -1};
    double principal_payoff = 0;
    double envelope_payoff = 0;      // realized integral of r max(W, envelopes)
    std::vector<double> worker_payoffs;
    std::vector<long> effort;        // steps each worker was delegated
    std::vector<std::vector<double>> index_paths; // per worker, when recording
    std::vector<int> delegations;    // worker per global step, when recording
    std::vector<std::vector<int>> threshold_paths; // per worker: threshold of m at each effort step
    bool invariant_ok = true;        // delegated arm attained the maximal envelope
};

struct RunOptions {
    bool record = false;
    bool check_index_rule = true;
};

ContestTrace run_policy(const Contest& contest, const Policy& policy, Rng& rng,
                        const RunOptions& opt = {});
ContestTrace run_index_contest(const Contest& contest, Rng& rng, const RunOptions& opt = {});

/// Exact evaluation of a Markov policy on the product of augmented chains.
struct ProductEvaluation {
    double principal = 0;
    double envelope = 0;
    std::vector<double> worker;      // at the root
    std::vector<double> min_worker;  // over reachable non-terminal states
    std::vector<std::string> witness;// state where the minimum is attained
    long states = 0;
};

ProductEvaluation evaluate_exact(const Contest& contest, const Policy& policy,
                                 long max_states = 2'000'000);

struct IrReport {
    double min_value = 0;
    int worker = -1;
    std::string witness;
    std::vector<double> per_worker_min;
    long states = 0;
    bool ok(double tol = 1e-8) const { return min_value >= -tol; }
};

IrReport check_ir(const Contest& contest, const Policy& policy);

struct McEstimate {
    double mean = 0, se = 0;
    long n = 0;
};

struct ContestSummary {
    McEstimate principal, envelope;
    std::vector<double> promotion_share;
    double outside_share = 0;
    long capped = 0;
    std::vector<double> time_quantiles; // promotion time at 10, 25, 50, 75, 90 %
    std::vector<McEstimate> worker_payoff;
    long replications = 0;
    bool invariant_ok = true;
};

/// Runs replications on `threads` workers; replication k always uses
/// substream k of the seed, so the summary does not depend on `threads`.
ContestSummary simulate(const Contest& contest, long replications, std::uint64_t seed, int threads,
                        const Policy& policy = {}, std::vector<ContestTrace>* keep = nullptr,
                        const RunOptions& opt = {});

enum class EnvelopeMode { exact, monte_carlo };

double principal_value_envelope(const Contest& contest, EnvelopeMode mode = EnvelopeMode::exact,
                                long replications = 0, int threads = 1);

/// Effort clocks rebuilt from realized index paths by level crossings.
/// paths[i][k] is worker i's index before his k-th effort step; the last
/// entry of each path is his state after the final step.
struct TimeChange {
    std::vector<std::vector<long>> clocks; // clocks[i][t] = T^i(t), t = 0..total
    std::vector<int> order;                // worker delegated at global step t
};

TimeChange time_change_construction(const std::vector<std::vector<double>>& paths);

/// Deterministic parallel loop over [0, n) on at most `threads` threads.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

} // namespace promo

#endif // PROMO_ENGINE_HPP
