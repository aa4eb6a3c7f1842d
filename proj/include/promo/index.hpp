#ifndef PROMO_INDEX_HPP
#define PROMO_INDEX_HPP

#include <string>
#include <vector>

#include "promo/linalg.hpp"
#include "promo/worker.hpp"

namespace promo {

struct AugState {
    int x;
    int m; // running minimum, m <= x
};

/**
 * Type paired with its running minimum. Only states reachable from the roots
 * are allocated. States at or above the promotion threshold are absorbing in
 * kernel(), but their successors are still allocated so that policies which
 * ignore the threshold can be simulated on the same table.
 */
class AugmentedChain {
public:
    AugmentedChain() = default;
    AugmentedChain(const TypeChain& chain, const std::vector<int>& threshold,
                   const std::vector<AugState>& roots);

    int size() const { return int(states_.size()); }
    int base_size() const { return n_; }
    const AugState& state(int id) const { return states_[id]; }
    /// Id of (x, m), or -1 when the pair was not allocated.
    int id(int x, int m) const { return lookup_[std::size_t(m) * n_ + x]; }
    int id(const AugState& s) const { return id(s.x, s.m); }
    bool promoted(int id) const { return promoted_[id]; }
    /// Id reached from `id` when the base type moves to x_next.
    int advance(int id, int x_next) const {
        const AugState& s = states_[id];
        return this->id(x_next, std::min(s.m, x_next));
    }
    /// Transition matrix with promoted rows replaced by self loops.
    const SpMat& kernel() const { return kernel_; }

private:
    int n_ = 0;
    std::vector<AugState> states_;
    std::vector<int> lookup_;
    std::vector<char> promoted_;
    SpMat kernel_;
};

/// Optimal stopping against a lump W: value and continuation set.
struct StoppingSolution {
    Vec value;              // max(W, continue-once value)
    Vec cont_value;         // flow now, then optimal
    std::vector<char> cont; // continue strictly better than W
};

StoppingSolution solve_stopping(const SpMat& P, const Vec& h, const Discount& d, double W,
                                std::vector<char> warm = {});

/// Value of optimally retiring on W against the flow stream h.
double retirement_value(const SpMat& P, const Vec& h, const Discount& d, int state, double W);

struct IndexOptions {
    int max_iter = 60;
    double tol = 1e-12; // relative bracket width at which bisection stops
};

/// Lump-unit Gittins index of the stream h on the chain P, all states.
Vec stream_index(const SpMat& P, const Vec& h, const Discount& d, const IndexOptions& opt = {});

/// Classical index of the principal's flow pi on the base chain.
Vec gittins_index(const WorkerSpec& spec, const IndexOptions& opt = {});

struct IndexTable {
    Vec gittins;       // per base state
    AugmentedChain aug;
    Vec strategic;     // per augmented state
    Vec flow;          // per augmented state: pi before promotion, pibar after
    std::string spec_hash;
    double tol = 0;

    double strategic_at(int x, int m) const;
};

/// Strategic index on the augmented chain rooted at the worker's initial
/// state (plus any extra roots).
IndexTable strategic_index(const WorkerModel& model, const std::vector<AugState>& extra_roots = {},
                           const IndexOptions& opt = {});

constexpr int kNeverQuit = -1;

/// Largest allocated diagonal state p with strategic(p, p) <= W, or kNeverQuit.
int quit_boundary(const IndexTable& table, double W);

Vec lower_envelope(const Vec& path);

} // namespace promo

#endif // PROMO_INDEX_HPP
