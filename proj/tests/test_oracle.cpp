#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "promo/errors.hpp"
#include "promo/oracle.hpp"
#include "support.hpp"

using namespace promo;

TEST_CASE("brute-force Gittins of constant and absorbed flows") {
    Rng rng(50);
    WorkerSpec s = test::random_spec(5, 0, rng, 2);
    s.pi.setConstant(0.4);
    for (int x = 0; x < 5; ++x) CHECK(std::abs(brute_force_gittins(s, x) - 0.4 / s.discount) <= 1e-10);

    const WorkerSpec b = test::simple_spec(build_bad_news_belief(0.5, 1, 5, 0.5), 0.1, 1, 1);
    CHECK(std::abs(brute_force_gittins(b, 0) - b.pi(0) / b.discount) <= 1e-10);
    CHECK(std::abs(brute_force_gittins(b, 4) - b.pi(4) / b.discount) <= 1e-10);
}

TEST_CASE("oracles refuse large instances") {
    Rng rng(51);
    const WorkerSpec s = test::random_spec(13, 0, rng, 2);
    CHECK_THROWS_AS(brute_force_gittins(s, 0), SizeError);
    CHECK_THROWS_AS(brute_force_single_arm(s, 0), SizeError);
}

TEST_CASE("brute-force single arm: free effort and a dominating option") {
    Rng rng(52);
    for (int k = 0; k < 8; ++k) {
        WorkerSpec s = test::random_spec(4, k % 2, rng, 2);
        s.cost.setZero();
        const double W = 0.3 * s.pi.maxCoeff() / s.discount;
        const SingleArmOracle o = brute_force_single_arm(s, W);
        for (const auto& e : o.policy) CHECK(e.action != ArmAction::promote);
        const double ret = retirement_value(to_sparse(s.chain.kernel()), s.pi, s.disc(), 2, W);
        CHECK(std::abs(o.value - ret) <= 1e-8);

        const double big = 10 * s.pi.maxCoeff() / s.discount;
        const SingleArmOracle q = brute_force_single_arm(s, big);
        CHECK(q.value == doctest::Approx(big).epsilon(1e-14));
    }
}

TEST_CASE("brute-force single arm rejects infeasible candidates") {
    Rng rng(53);
    const WorkerSpec s = test::random_spec(5, 0, rng, 3);
    const SingleArmOracle o = brute_force_single_arm(s, 0.2);
    CHECK(o.feasible > 0);
    CHECK(o.feasible < o.candidates);
}

TEST_CASE("corridor structure recogniser") {
    using E = ArmPolicyEntry;
    const std::vector<E> good = {{{3, 3}, ArmAction::cont}, {{4, 3}, ArmAction::promote},
                                 {{2, 2}, ArmAction::cont}, {{3, 2}, ArmAction::promote},
                                 {{1, 1}, ArmAction::quit}};
    CHECK(has_corridor_structure(good));
    std::string why;
    const std::vector<E> holes = {{{3, 3}, ArmAction::cont}, {{4, 3}, ArmAction::cont},
                                  {{2, 2}, ArmAction::quit}, {{1, 1}, ArmAction::cont}};
    CHECK(!has_corridor_structure(holes, &why));
    CHECK(!why.empty());
    const std::vector<E> inverted = {{{2, 2}, ArmAction::promote}, {{3, 2}, ArmAction::cont}};
    CHECK(!has_corridor_structure(inverted));
}

TEST_CASE("value iteration agrees with the policy-set solve") {
    Rng rng(54);
    for (int k = 0; k < 10; ++k) {
        WorkerSpec s = test::random_spec(6, k % 2, rng, 3);
        s.cost.setZero();
        ContestConfig cfg;
        cfg.workers = {s};
        cfg.outside_option = test::uniform(rng, 0, s.pi.maxCoeff() / s.discount);
        const Contest C = prepare_contest(cfg);
        const double ret =
            retirement_value(to_sparse(s.chain.kernel()), s.pi, s.disc(), 3, cfg.outside_option);
        CHECK(std::abs(bandit_retirement_value(C) - ret) <= 1e-10 * std::max(1.0, ret));
    }
}

TEST_CASE("enumerated contests respect the envelope bound") {
    for (const char* name : {"tiny2x5.json", "badnews2x5.json"}) {
        const Contest C = prepare_contest(load_config(test::fixture(name)));
        const double bound = principal_value_envelope(C);
        const auto fam = standard_family(C);
        REQUIRE(!fam.empty());
        const std::string index_name = "index shift+0+0 quit-at-W";
        const auto it = std::find_if(fam.begin(), fam.end(),
                                     [&](const NamedPolicy& p) { return p.name == index_name; });
        REQUIRE(it != fam.end());
        const EnumerationReport rep = enumerate_feasible_contests(C, fam);
        CHECK(rep.n_candidates == long(fam.size()));
        CHECK(rep.n_feasible >= 1);
        CHECK(rep.best_value <= bound + 1e-9);
        for (const auto& r : rep.results) {
            if (r.name == index_name) {
                CHECK(r.feasible);
                CHECK(std::abs(r.value - bound) <= 1e-8);
            }
            if (!r.feasible) {
                CHECK(r.min_worker < -1e-8);
                CHECK(!r.witness.empty());
            } else {
                CHECK(r.value <= bound + 1e-9);
            }
        }
        const EnumerationReport only = enumerate_feasible_contests(C, {*it});
        CHECK(std::abs(only.best_value - bound) <= 1e-8);
    }
}

TEST_CASE("product-chain retirement value is bounded by the state cap") {
    const Contest C = prepare_contest(load_config(test::fixture("badnews2.json")));
    CHECK_THROWS_AS(bandit_retirement_value(C, 100), SizeError);
}
