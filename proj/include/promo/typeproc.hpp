#ifndef PROMO_TYPEPROC_HPP
#define PROMO_TYPEPROC_HPP

#include <string>
#include <utility>
#include <vector>

#include "promo/linalg.hpp"
#include "promo/rng.hpp"

namespace promo {

enum class JumpSign { none, up_only, down_only };
enum class Boundary { absorbing, reflecting };

/// Discrete-time type process: a stochastically monotone kernel on an
/// ordered grid, sampled every `step` units of effort time.
class TypeChain {
public:
    TypeChain() = default;
    TypeChain(Vec grid, Mat kernel, double step, JumpSign sign, Boundary lower, Boundary upper,
              int origin = 0);

    int size() const { return int(grid_.size()); }
    int top() const { return size() - 1; }
    const Vec& grid() const { return grid_; }
    const Mat& kernel() const { return kernel_; }
    double step() const { return step_; }
    JumpSign jump_sign() const { return sign_; }
    Boundary lower() const { return lower_; }
    Boundary upper() const { return upper_; }
    /// State the generator was anchored at (p0 for beliefs, 0 for the ladder).
    int origin() const { return origin_; }

    /// Successors of x with positive probability, paired with cumulative mass.
    const std::vector<std::pair<int, double>>& row(int x) const { return rows_[x]; }

    /// Successor of x given a uniform draw u; the same u drives every state,
    /// which makes this the monotone coupling.
    int successor(int x, double u) const;

private:
    Vec grid_;
    Mat kernel_;
    double step_ = 1.0;
    JumpSign sign_ = JumpSign::none;
    Boundary lower_ = Boundary::absorbing;
    Boundary upper_ = Boundary::absorbing;
    int origin_ = 0;
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

TypeChain build_bad_news_belief(double p0, double lam, int grid_points, double delta);
TypeChain build_brownian_belief(double p0, double snr, int grid_points, double delta);
TypeChain build_ladder_deadend(double mu, double lam, double x_max, int grid_points, double delta);

/// Samples one transition from `state`.
int step(const TypeChain& chain, int state, Rng& rng);

struct Violation {
    std::string kind;    // row_sum, negative, monotonicity, jump_sign, upward, boundary
    std::vector<int> states;
    std::string message;
};

/// Lists every violated admissibility condition; empty means admissible.
std::vector<Violation> validate(const TypeChain& chain);

/// Nearest grid index to a value.
int nearest_state(const TypeChain& chain, double value);

const char* to_string(JumpSign s);
const char* to_string(Boundary b);
JumpSign jump_sign_from(const std::string& s);
Boundary boundary_from(const std::string& s);

} // namespace promo

#endif // PROMO_TYPEPROC_HPP
