#include <doctest.h>

#include <cmath>

#include "promo/errors.hpp"
#include "promo/io.hpp"
#include "promo/typeproc.hpp"
#include "support.hpp"

using namespace promo;

namespace {

// binomial frequency check at 4 sigma
void check_row_frequencies(const TypeChain& c, int x, long draws, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<long> count(c.size(), 0);
    for (long k = 0; k < draws; ++k) count[step(c, x, rng)]++;
    for (int y = 0; y < c.size(); ++y) {
        const double p = c.kernel()(x, y);
        const double sd = std::sqrt(p * (1 - p) / double(draws));
        CHECK(std::abs(double(count[y]) / double(draws) - p) <= 4 * sd + 1e-12);
    }
}

} // namespace

TEST_CASE("bad-news belief drifts up and drops to the bottom") {
    const double d = 1e-3;
    const TypeChain c = build_bad_news_belief(0.5, 1.0, 30, d);
    CHECK(validate(c).empty());
    CHECK(c.jump_sign() == JumpSign::down_only);
    const int x = c.origin();
    CHECK(c.grid()(x) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.kernel()(x, x + 1) > 0);
    CHECK(c.grid()(x + 1) > 0.5);
    // bottom mass is 0.5 lam delta to first order
    CHECK(std::abs(c.kernel()(x, 0) - 0.5 * d) <= d * d);
    CHECK(c.kernel()(0, 0) == 1.0);
}

TEST_CASE("bad-news hazard per step") {
    const TypeChain c = build_bad_news_belief(0.8, 2.0, 10, 0.01);
    const int x = c.origin();
    // news arrive only for the bad type: belief weight 1 - p
    const double expected = (1 - 0.8) * -std::expm1(-2.0 * 0.01);
    CHECK(std::abs(c.kernel()(x, 0) - expected) <= 1e-12);
    check_row_frequencies(c, x, 1'000'000, 3);
}

TEST_CASE("bad-news parameter errors") {
    CHECK_THROWS_AS(build_bad_news_belief(0.0, 1, 5, 0.1), DomainError);
    CHECK_THROWS_AS(build_bad_news_belief(0.5, 0, 5, 0.1), DomainError);
    CHECK_THROWS_AS(build_bad_news_belief(0.5, 1, 2, 0.1), DomainError);
}

TEST_CASE("brownian belief is a martingale birth-death chain") {
    const TypeChain c = build_brownian_belief(0.5, 1.0, 21, 0.02);
    CHECK(validate(c).empty());
    CHECK(c.jump_sign() == JumpSign::none);
    for (int i = 1; i + 1 < c.size(); ++i) {
        const double mean = c.kernel().row(i).dot(c.grid());
        CHECK(std::abs(mean - c.grid()(i)) <= 1e-10);
        CHECK(std::abs(c.kernel()(i, i + 1) - c.kernel()(i, i - 1)) <= 1e-15);
    }
    const TypeChain still = build_brownian_belief(0.5, 0.0, 9, 0.1);
    CHECK(still.kernel() == Mat::Identity(9, 9));
}

TEST_CASE("brownian belief rejects a grid that is too fine") {
    try {
        build_brownian_belief(0.5, 4.0, 101, 1.0);
        FAIL("expected a discretization error");
    } catch (const DiscretizationError& e) {
        CHECK(e.state > 0);
        CHECK(std::string(e.what()).find("state") != std::string::npos);
    }
}

TEST_CASE("brownian belief keeps the mean") {
    const TypeChain c = build_brownian_belief(0.5, 1.0, 101, 1e-3);
    const int x0 = nearest_state(c, 0.5);
    const long paths = 4000;
    double s = 0, ss = 0;
    for (long k = 0; k < paths; ++k) {
        Rng rng = Rng::substream(9, std::uint64_t(k));
        int x = x0;
        for (int t = 0; t < 1000; ++t) x = step(c, x, rng);
        s += c.grid()(x);
        ss += c.grid()(x) * c.grid()(x);
    }
    const double mean = s / paths;
    const double se = std::sqrt((ss / paths - mean * mean) / paths);
    CHECK(std::abs(mean - 0.5) <= 3 * se);
}

TEST_CASE("ladder with dead ends") {
    const TypeChain flat = build_ladder_deadend(1.0, 0.0, 1.0, 11, 0.1);
    CHECK(validate(flat).empty());
    int x = 0, steps = 0;
    Rng rng(1);
    while (x < flat.top()) x = step(flat, x, rng), ++steps;
    CHECK(std::abs(steps * 0.1 - 1.0) <= 0.1 + 1e-12);

    const TypeChain c = build_ladder_deadend(1.0, 1.0, 1.0, 101, 0.01);
    CHECK(validate(c).empty());
    CHECK(c.kernel()(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(c.kernel()(0, 1) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(c.kernel()(50, 0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK_THROWS_AS(build_ladder_deadend(1.0, 10.0, 1.0, 11, 0.1), DomainError);
}

TEST_CASE("step on absorbing and identity chains") {
    const TypeChain c = build_bad_news_belief(0.5, 1.0, 6, 0.5);
    Rng rng(4);
    for (int k = 0; k < 100; ++k) CHECK(step(c, 0, rng) == 0);
    const TypeChain id(Vec::LinSpaced(4, 0, 1), Mat::Identity(4, 4), 1.0, JumpSign::none,
                       Boundary::absorbing, Boundary::absorbing);
    for (int x = 0; x < 4; ++x)
        for (int k = 0; k < 50; ++k) CHECK(step(id, x, rng) == x);
}

TEST_CASE("bad-news successor frequencies") {
    const TypeChain c = build_bad_news_belief(0.5, 1.0, 8, 0.5);
    check_row_frequencies(c, 3, 1'000'000, 77);
}

TEST_CASE("validate reports violations") {
    const TypeChain id(Vec::LinSpaced(4, 0, 1), Mat::Identity(4, 4), 1.0, JumpSign::none,
                       Boundary::reflecting, Boundary::reflecting);
    int upward = 0;
    for (const auto& v : validate(id)) upward += v.kind == "upward";
    CHECK(upward == 3);

    for (const TypeChain& g : {build_bad_news_belief(0.3, 2.0, 12, 0.1),
                               build_brownian_belief(0.4, 0.8, 11, 0.2),
                               build_ladder_deadend(1.0, 0.5, 2.0, 21, 0.1)})
        CHECK(validate(g).empty());

    // swap two rows of a monotone birth-death chain
    Rng rng(5);
    TypeChain ok = test::random_chain(5, 0, rng);
    Mat K = ok.kernel();
    K.row(1).swap(K.row(3));
    const TypeChain bad(ok.grid(), K, 1.0, JumpSign::none, Boundary::reflecting,
                        Boundary::reflecting);
    bool named = false;
    for (const auto& v : validate(bad))
        if (v.kind == "monotonicity" && v.states.size() == 2) named = true;
    CHECK(named);

    Mat R = ok.kernel();
    R(2, 2) += 0.1;
    const TypeChain off(ok.grid(), R, 1.0, JumpSign::none, Boundary::reflecting,
                        Boundary::reflecting);
    bool row = false;
    for (const auto& v : validate(off)) row = row || (v.kind == "row_sum" && v.states[0] == 2);
    CHECK(row);
}

TEST_CASE("common-uniform coupling preserves order") {
    Rng gen(8);
    for (int kind = 0; kind < 2; ++kind) {
        const TypeChain c = test::random_chain(7, kind, gen);
        Rng rng(12);
        long broken = 0;
        for (int path = 0; path < 10000; ++path) {
            int lo = int(rng.below(7));
            int hi = lo + int(rng.below(std::uint64_t(7 - lo)));
            for (int t = 0; t < 20; ++t) {
                const double u = rng.uniform();
                lo = c.successor(lo, u);
                hi = c.successor(hi, u);
                broken += lo > hi;
            }
        }
        CHECK(broken == 0);
    }
}

TEST_CASE("chain JSON round trip is bit exact") {
    for (const TypeChain& c : {build_bad_news_belief(0.37, 1.3, 9, 0.07),
                               build_brownian_belief(0.5, 0.9, 7, 0.3)}) {
        const TypeChain back = chain_from_json(Json::parse(to_json(c).dump()));
        CHECK(back.grid() == c.grid());
        CHECK(back.kernel() == c.kernel());
        CHECK(back.step() == c.step());
        CHECK(back.jump_sign() == c.jump_sign());
        CHECK(back.lower() == c.lower());
        CHECK(back.upper() == c.upper());
        CHECK(back.origin() == c.origin());
    }
}
