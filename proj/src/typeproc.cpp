#include "promo/typeproc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "promo/errors.hpp"

namespace promo {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kCdfTol = 1e-12;

} // namespace

TypeChain::TypeChain(Vec grid, Mat kernel, double step, JumpSign sign, Boundary lower,
                     Boundary upper, int origin)
    : grid_(std::move(grid)), kernel_(std::move(kernel)), step_(step), sign_(sign),
      lower_(lower), upper_(upper), origin_(origin) {
    if (kernel_.rows() != grid_.size() || kernel_.cols() != grid_.size())
        throw ConfigError("kernel must be square with one row per grid point");
    if (grid_.size() == 0) throw ConfigError("empty grid");
    if (!(step_ > 0)) throw ConfigError("step must be positive");
    if (origin_ < 0 || origin_ >= size()) throw ConfigError("origin outside the grid");
    rows_.resize(size());
    for (int i = 0; i < size(); ++i) {
        double acc = 0;
        for (int j = 0; j < size(); ++j) {
            if (kernel_(i, j) > 0) {
                acc += kernel_(i, j);
                rows_[i].emplace_back(j, acc);
            }
        }
    }
}

int TypeChain::successor(int x, double u) const {
    const auto& r = rows_[x];
    if (r.empty()) return x;
    // scale by the row's own total so rounding in the last partial sum never
    // pushes u past the end
    const double target = u * r.back().second;
    for (const auto& [j, c] : r)
        if (target < c) return j;
    return r.back().first;
}

int step(const TypeChain& chain, int state, Rng& rng) {
    if (state < 0 || state >= chain.size()) throw std::out_of_range("state outside the grid");
    return chain.successor(state, rng.uniform());
}

TypeChain build_bad_news_belief(double p0, double lam, int grid_points, double delta) {
    if (!(p0 > 0 && p0 < 1)) throw DomainError("bad-news belief: p0 must lie in (0, 1)");
    if (!(lam > 0)) throw DomainError("bad-news belief: lam must be positive");
    if (grid_points < 3) throw DomainError("bad-news belief: need at least 3 grid points");
    if (!(delta > 0)) throw DomainError("bad-news belief: step must be positive");

    // Without news the log-odds of "good" rise by exactly lam * delta per
    // step, so a log-odds grid keeps the no-news update on the grid.
    const int n = grid_points;
    const double l0 = std::log(p0 / (1 - p0));
    const double arrive = -std::expm1(-lam * delta);
    Vec grid(n);
    grid(0) = 0.0;
    for (int k = 1; k < n; ++k) grid(k) = 1.0 / (1.0 + std::exp(-(l0 + (k - 1) * lam * delta)));

    Mat K = Mat::Zero(n, n);
    K(0, 0) = 1.0;
    K(n - 1, n - 1) = 1.0;
    for (int k = 1; k < n - 1; ++k) {
        const double news = (1 - grid(k)) * arrive;
        K(k, 0) = news;
        K(k, k + 1) = 1 - news;
    }
    return TypeChain(grid, K, delta, JumpSign::down_only, Boundary::absorbing,
                     Boundary::absorbing, 1);
}

TypeChain build_brownian_belief(double p0, double snr, int grid_points, double delta) {
    if (!(p0 > 0 && p0 < 1)) throw DomainError("brownian belief: p0 must lie in (0, 1)");
    if (!(snr >= 0)) throw DomainError("brownian belief: snr must be nonnegative");
    if (grid_points < 3) throw DomainError("brownian belief: need at least 3 grid points");
    if (!(delta > 0)) throw DomainError("brownian belief: step must be positive");

    const int n = grid_points;
    const double h = 1.0 / (n - 1);
    Vec grid = Vec::LinSpaced(n, 0.0, 1.0);
    Mat K = Mat::Zero(n, n);
    K(0, 0) = 1.0;
    K(n - 1, n - 1) = 1.0;
    for (int i = 1; i < n - 1; ++i) {
        const double s = snr * grid(i) * (1 - grid(i));
        const double move = s * s * delta / (2 * h * h);
        if (2 * move > 1)
            throw DiscretizationError("brownian belief: grid too fine for the step, "
                                      "moment matching needs negative holding mass",
                                      i);
        K(i, i - 1) = move;
        K(i, i + 1) = move;
        K(i, i) = 1 - 2 * move;
    }
    return TypeChain(grid, K, delta, JumpSign::none, Boundary::absorbing, Boundary::absorbing,
                     int(std::lround(p0 * (n - 1))));
}

TypeChain build_ladder_deadend(double mu, double lam, double x_max, int grid_points, double delta) {
    if (!(mu > 0)) throw DomainError("ladder: mu must be positive");
    if (!(lam >= 0)) throw DomainError("ladder: lam must be nonnegative");
    if (!(x_max > 0)) throw DomainError("ladder: x_max must be positive");
    if (grid_points < 2) throw DomainError("ladder: need at least 2 grid points");
    if (!(delta > 0)) throw DomainError("ladder: step must be positive");
    const double q = lam * delta;
    if (q >= 1) throw DomainError("ladder: lam * delta >= 1, step too large");

    const int n = grid_points;
    const double h = x_max / (n - 1);
    double u = mu * delta / h;
    if (u > 1 + 1e-9)
        throw DiscretizationError("ladder: mu * delta exceeds one grid cell", 0);
    u = std::min(u, 1.0);

    Vec grid = Vec::LinSpaced(n, 0.0, x_max);
    Mat K = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, 0) += q;
        if (i < n - 1) {
            K(i, i + 1) += (1 - q) * u;
            K(i, i) += (1 - q) * (1 - u);
        } else {
            K(i, i) += 1 - q;
        }
    }
    const Boundary up = lam == 0 ? Boundary::absorbing : Boundary::reflecting;
    return TypeChain(grid, K, delta, JumpSign::down_only, Boundary::reflecting, up, 0);
}

std::vector<Violation> validate(const TypeChain& chain) {
    std::vector<Violation> out;
    const Mat& K = chain.kernel();
    const int n = chain.size();

    for (int i = 0; i < n; ++i) {
        if ((K.row(i).array() < 0).any())
            out.push_back({"negative", {i}, "row " + std::to_string(i) + " has negative mass"});
        const double s = K.row(i).sum();
        if (std::abs(s - 1) > kRowTol) {
            std::ostringstream os;
            os.precision(17);
            os << "row " << i << " sums to " << s;
            out.push_back({"row_sum", {i}, os.str()});
        }
    }

    const Mat F = row_cdf(K);
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (F(i, j) < F(i + 1, j) - kCdfTol) {
                out.push_back({"monotonicity", {i, i + 1},
                               "successor law of state " + std::to_string(i + 1) +
                                   " does not dominate that of state " + std::to_string(i)});
                break;
            }
        }
    }

    const JumpSign sign = chain.jump_sign();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (K(i, j) <= 0) continue;
            const bool long_down = j < i - 1;
            const bool long_up = j > i + 1;
            bool bad = false;
            if (sign == JumpSign::up_only) bad = long_down;
            if (sign == JumpSign::down_only) bad = long_up;
            if (sign == JumpSign::none) bad = long_down || long_up;
            if (bad) {
                out.push_back({"jump_sign", {i, j},
                               "transition " + std::to_string(i) + " -> " + std::to_string(j) +
                                   " is not allowed for jump_sign " + to_string(sign)});
                break;
            }
        }
    }

    if (chain.lower() == Boundary::absorbing && K(0, 0) < 1 - kRowTol)
        out.push_back({"boundary", {0}, "lower boundary declared absorbing but state 0 moves"});
    if (chain.upper() == Boundary::absorbing && K(n - 1, n - 1) < 1 - kRowTol)
        out.push_back({"boundary", {n - 1}, "upper boundary declared absorbing but top moves"});

    for (int i = 0; i < n - 1; ++i) {
        if (i == 0 && chain.lower() == Boundary::absorbing) continue;
        if (K.row(i).tail(n - 1 - i).sum() <= 0)
            out.push_back({"upward", {i}, "state " + std::to_string(i) + " cannot move up"});
    }
    return out;
}

int nearest_state(const TypeChain& chain, double value) {
    Eigen::Index k;
    (chain.grid().array() - value).abs().minCoeff(&k);
    return int(k);
}

const char* to_string(JumpSign s) {
    switch (s) {
    case JumpSign::up_only: return "up_only";
    case JumpSign::down_only: return "down_only";
    default: return "none";
    }
}

const char* to_string(Boundary b) { return b == Boundary::absorbing ? "absorbing" : "reflecting"; }

JumpSign jump_sign_from(const std::string& s) {
    if (s == "none") return JumpSign::none;
    if (s == "up_only") return JumpSign::up_only;
    if (s == "down_only") return JumpSign::down_only;
    throw ConfigError("unknown jump_sign '" + s + "'");
}

Boundary boundary_from(const std::string& s) {
    if (s == "absorbing") return Boundary::absorbing;
    if (s == "reflecting") return Boundary::reflecting;
    throw ConfigError("unknown boundary '" + s + "'");
}

} // namespace promo
