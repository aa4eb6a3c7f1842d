#include <doctest.h>

#include <cmath>

#include "promo/index.hpp"
#include "promo/oracle.hpp"
#include "support.hpp"

using namespace promo;

namespace {

// best value over every continuation set, by one linear solve per set
double stopping_set_oracle(const Mat& P, const Vec& h, const Discount& d, int state, double W) {
    const int n = int(P.rows());
    double best = -1e300;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Mat A = Mat::Identity(n, n);
        Vec b = Vec::Constant(n, W);
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) {
                A.row(i) -= d.beta * P.row(i);
                b(i) = h(i) * d.weight;
            }
        best = std::max(best, Vec(A.partialPivLu().solve(b))(state));
    }
    return best;
}

Vec gittins_at_zero_cost(WorkerSpec s) {
    s.cost.setZero();
    return gittins_index(s);
}

} // namespace

TEST_CASE("retirement value against stopping-set enumeration") {
    Rng rng(11);
    for (int k = 0; k < 30; ++k) {
        const WorkerSpec s = test::random_spec(3, k % 2, rng, 1);
        const SpMat P = to_sparse(s.chain.kernel());
        const Discount d = s.disc();
        const double W = test::uniform(rng, 0, 2 * s.pi.maxCoeff() / s.discount);
        for (int x = 0; x < 3; ++x)
            CHECK(std::abs(retirement_value(P, s.pi, d, x, W) -
                           stopping_set_oracle(s.chain.kernel(), s.pi, d, x, W)) <= 1e-10);
    }
}

TEST_CASE("retirement value at the extremes") {
    Rng rng(12);
    const WorkerSpec s = test::random_spec(5, 0, rng, 1);
    const SpMat P = to_sparse(s.chain.kernel());
    const Discount d = s.disc();
    const Vec forever = discounted_resolvent(s.chain.kernel(), Vec(s.pi * d.weight), d.beta);
    const double big = 10 * s.pi.maxCoeff() / s.discount;
    for (int x = 0; x < 5; ++x) {
        CHECK(std::abs(retirement_value(P, s.pi, d, x, 0) - forever(x)) <= 1e-10);
        CHECK(retirement_value(P, s.pi, d, x, big) == doctest::Approx(big).epsilon(1e-14));
    }
}

TEST_CASE("Gittins index of a constant flow") {
    Rng rng(13);
    WorkerSpec s = test::random_spec(6, 1, rng, 2);
    s.pi.setConstant(0.35);
    const Vec G = gittins_index(s);
    CHECK((G.array() - 0.35 / s.discount).abs().maxCoeff() <= 1e-8);

    const WorkerSpec b = test::simple_spec(build_bad_news_belief(0.5, 1, 6, 0.5), 0.1, 1, 1);
    const Vec Gb = gittins_index(b);
    CHECK(std::abs(Gb(0) - b.pi(0) / b.discount) <= 1e-8);
}

TEST_CASE("Gittins index against brute force") {
    Rng rng(14);
    for (int k = 0; k < 20; ++k) {
        const WorkerSpec s = test::random_spec(4 + k % 3, k % 2, rng, 1);
        const Vec G = gittins_index(s);
        for (int x = 0; x < s.chain.size(); ++x)
            CHECK(std::abs(G(x) - brute_force_gittins(s, x)) <= 1e-6);
    }
}

TEST_CASE("index tables are ordered") {
    Rng rng(15);
    for (int k = 0; k < 30; ++k) {
        const WorkerSpec s = test::random_spec(6, k % 2, rng, 5);
        const WorkerModel M(s);
        const IndexTable T = strategic_index(M);
        for (int x = 0; x + 1 < 6; ++x) CHECK(T.gittins(x) <= T.gittins(x + 1) + 1e-9);
        for (int id = 0; id < T.aug.size(); ++id) {
            const AugState a = T.aug.state(id);
            CHECK(a.m <= a.x);
            CHECK(T.strategic(id) <= T.gittins(a.x) + 1e-8);
            if (T.aug.promoted(id)) CHECK(T.strategic(id) == M.perp(a.x));
            const int up = a.x + 1 < 6 ? T.aug.id(a.x + 1, a.m) : -1;
            if (up >= 0 && !T.aug.promoted(up)) CHECK(T.strategic(id) <= T.strategic(up) + 1e-9);
        }
        CHECK(T.aug.size() <= 6 * 7 / 2);
    }
}

TEST_CASE("augmented kernel: minima never rise and promoted states absorb") {
    Rng rng(16);
    const WorkerSpec s = test::random_spec(6, 0, rng, 4);
    const WorkerModel M(s);
    const IndexTable T = strategic_index(M);
    const SpMat& K = T.aug.kernel();
    for (int id = 0; id < K.outerSize(); ++id)
        for (SpMat::InnerIterator it(K, id); it; ++it) {
            if (it.value() == 0) continue;
            CHECK(T.aug.state(int(it.col())).m <= T.aug.state(id).m);
            if (T.aug.promoted(id)) CHECK(it.col() == id);
        }
}

TEST_CASE("strategic index rises with the prize") {
    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
        WorkerSpec s = test::random_spec(6, k % 2, rng, 4);
        const IndexTable A = strategic_index(WorkerModel(s));
        s.prize *= 1.5;
        const IndexTable B = strategic_index(WorkerModel(s));
        REQUIRE(A.aug.size() <= B.aug.size());
        for (int id = 0; id < A.aug.size(); ++id) {
            const AugState a = A.aug.state(id);
            const int j = B.aug.id(a);
            if (j >= 0) CHECK(A.strategic(id) <= B.strategic(j) + 1e-9);
        }
    }
}

// The raw index moves with x on a birth-death grid; its running minimum,
// which the delegation rule consults, falls only when m does. Entering the
// promoted set is the exception: the index drops to the perpetuity there.
TEST_CASE("index envelope falls only at new minima") {
    Rng rng(18);
    long falls = 0, promotion_drops = 0;
    for (int k = 0; k < 10; ++k) {
        const WorkerSpec s = test::random_spec(7, k % 2, rng, 5);
        const WorkerModel M(s);
        const IndexTable T = strategic_index(M);
        for (int path = 0; path < 1000; ++path) {
            int id = T.aug.id(s.initial, s.initial);
            double env = T.strategic(id);
            for (int t = 0; t < 200 && !T.aug.promoted(id); ++t) {
                const int next = T.aug.advance(id, step(s.chain, T.aug.state(id).x, rng));
                const double v = T.strategic(next);
                if (v < env - 1e-12) {
                    if (T.aug.promoted(next)) {
                        ++promotion_drops;
                    } else {
                        ++falls;
                        CHECK(T.aug.state(next).m < T.aug.state(id).m);
                    }
                }
                env = std::min(env, v);
                id = next;
            }
        }
    }
    CHECK(falls > 0);
    MESSAGE("envelope falls " << falls << ", drops on entering the promoted set " << promotion_drops);
}

TEST_CASE("free effort makes the strategic index classical") {
    Rng rng(19);
    for (int k = 0; k < 10; ++k) {
        WorkerSpec s = test::random_spec(6, k % 2, rng, 5);
        s.cost.setZero();
        const IndexTable T = strategic_index(WorkerModel(s));
        for (int x = 0; x < 6; ++x) {
            const int id = T.aug.id(x, x);
            if (id >= 0) CHECK(std::abs(T.strategic(id) - T.gittins(x)) <= 1e-6);
        }
    }
}

TEST_CASE("strategic index increases to the classical index as cost vanishes") {
    Rng rng(20);
    const WorkerSpec base = test::random_spec(5, 0, rng, 4);
    const Vec G = gittins_at_zero_cost(base);
    Vec prev = Vec::Constant(5, -1);
    for (double f : {1.0, 0.5, 0.25, 0.1, 0.03, 0.01, 0.001, 0.0}) {
        WorkerSpec s = base;
        s.cost *= f;
        const IndexTable T = strategic_index(WorkerModel(s));
        Vec diag(5);
        for (int x = 0; x < 5; ++x) diag(x) = T.strategic_at(x, x);
        for (int x = 0; x < 5; ++x) CHECK(diag(x) >= prev(x) - 1e-9);
        prev = diag;
    }
    CHECK((prev - G).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("quit boundary") {
    Rng rng(21);
    WorkerSpec s = test::random_spec(5, 0, rng, 4);
    s.pi.array() += 0.1;
    const IndexTable T = strategic_index(WorkerModel(s));
    CHECK(quit_boundary(T, 0) == kNeverQuit);
    CHECK(quit_boundary(T, T.strategic_at(4, 4)) == 4);
    for (int p = 0; p < 5; ++p) {
        const int q = quit_boundary(T, T.strategic_at(p, p));
        CHECK(q >= p);
        if (q >= 0) CHECK(T.strategic_at(q, q) <= T.strategic_at(p, p));
    }

    const int G = 41;
    const WorkerSpec L =
        test::simple_spec(build_ladder_deadend(1, 1, 2, G, 0.05), 1.0, 0.5, 1 + 0 * G);
    WorkerSpec ladder = L;
    ladder.initial = nearest_state(ladder.chain, 1.0);
    const IndexTable LT = strategic_index(WorkerModel(ladder));
    CHECK(quit_boundary(LT, 0.0) == kNeverQuit);
    CHECK(quit_boundary(LT, 0.5 * LT.strategic_at(0, 0)) == kNeverQuit);
}

TEST_CASE("lower envelope") {
    Vec a(4);
    a << 3, 5, 2, 4;
    Vec want(4);
    want << 3, 3, 2, 2;
    CHECK(lower_envelope(a) == want);
    Vec dec(4);
    dec << 4, 3, 3, 1;
    CHECK(lower_envelope(dec) == dec);

    Rng rng(22);
    for (int k = 0; k < 10000; ++k) {
        const int n = 1 + int(rng.below(12));
        Vec p(n);
        for (int i = 0; i < n; ++i) p(i) = std::floor(test::uniform(rng, -5, 5));
        const Vec e = lower_envelope(p);
        for (int i = 0; i < n; ++i) {
            double m = p(0);
            for (int j = 1; j <= i; ++j) m = std::min(m, p(j));
            CHECK(e(i) == m);
        }
    }
}
