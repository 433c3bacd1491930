#include "doctest.h"
#include "oracles.hpp"
#include "sieve_oracle.hpp"

#include "twistlocal/errors.hpp"
#include "twistlocal/picard.hpp"

#include <map>
#include <random>
#include <set>

using namespace twistlocal;
using namespace twistlocal::picard;

using sieve_oracle::naive_sieve;
using sieve_oracle::random_element;
using sieve_oracle::random_instance;

TEST_CASE("cusp order at prime level") {
    CHECK(cusp_order_prime(13) == 1);
    CHECK(cusp_order_prime(17) == 4);
    CHECK(cusp_order_prime(73) == 6);
    CHECK(cusp_order_prime(5) == 1);
    CHECK(cusp_order_prime(11) == 5);
    CHECK_THROWS_AS(cusp_order_prime(3), DomainError);
    CHECK_THROWS_AS(cusp_order_prime(2), DomainError);
    CHECK_THROWS_AS(cusp_order_prime(15), DomainError);
    for (std::uint64_t N = 5; N < 10000; ++N) {
        if (!oracle::is_prime(N)) continue;
        const auto o = cusp_order_prime(N);
        CHECK((N - 1) % o == 0);
        // numerator of (N-1)/12 in lowest terms
        const auto g = std::gcd<std::uint64_t>(N - 1, 12);
        CHECK(o == (N - 1) / g);
    }
}

TEST_CASE("parity of the cusp order matches N mod 24") {
    for (std::uint64_t N = 5; N < 10000; ++N) {
        if (!oracle::is_prime(N)) continue;
        const bool even = cusp_order_prime(N) % 2 == 0;
        CHECK_MESSAGE(even == (N % 24 == 1 || N % 24 == 17), "N = " << N);
    }
}

TEST_CASE("cusp order at composite level") {
    CHECK(cusp_order_composite(13, {2}) == 3);
    CHECK(cusp_order_composite(7, {2, 3}) == 6);
    CHECK(cusp_order_composite(5, {2}) == 1);
    CHECK_THROWS_WITH_AS(cusp_order_composite(13, {5, 17}), doctest::Contains("outside stated case"), DomainError);
    CHECK_THROWS_WITH_AS(cusp_order_composite(11, {2}), doctest::Contains("outside stated case"), DomainError);
    CHECK_THROWS_AS(cusp_order_composite(3, {2}), DomainError);
    CHECK_THROWS_AS(cusp_order_composite(13, {}), DomainError);
    CHECK_THROWS_AS(cusp_order_composite(13, {4}), DomainError);
}

TEST_CASE("Pic^1 verdicts") {
    CHECK(pic1_verdict_prime(73, true).value == Pic1::Empty);
    CHECK(pic1_verdict_prime(41, true).value == Pic1::Empty);
    CHECK(pic1_verdict_prime(13, true).value == Pic1::NonemptyClass);
    CHECK(pic1_verdict_prime(13, false).value == Pic1::NonemptyClass);
    CHECK(pic1_verdict_prime(13, false).reason.find("local points") != std::string::npos);
    CHECK(pic1_verdict_prime(17, false).value == Pic1::Unknown);
    CHECK(pic1_verdict_composite(13, {11, 5}, true).value == Pic1::Empty);
    CHECK(pic1_verdict_composite(13, {5}, true).value == Pic1::Unknown);
    CHECK(pic1_verdict_composite(13, {11, 5}, false).value == Pic1::Unknown);
    CHECK(to_string(Pic1::Empty) == "Empty");
}

TEST_CASE("cuspidal relations") {
    CuspidalModel m{21, {{"w13", 8, 15}, {"w2", 13, 7}}};
    const auto sols = solve_cuspidal_relations(m);
    std::vector<std::uint64_t> brute;
    for (std::uint64_t P = 0; P < 21; ++P) {
        if (((1 + 21 - 8) * P) % 21 == 15 && ((1 + 21 - 13) * P) % 21 == 7) brute.push_back(P);
    }
    CHECK(sols == brute);
    const bool eleven = std::find(sols.begin(), sols.end(), 11) != sols.end();
    MESSAGE("P = 11 solves both relations: " << (eleven ? "yes" : "no") << "; (1-8)*11 mod 21 = " << (14 * 11) % 21);
    CHECK_FALSE(eleven);

    CuspidalModel all{12, {}};
    CHECK(solve_cuspidal_relations(all).size() == 12);
    CuspidalModel none{12, {{"id", 1, 5}}};
    CHECK(solve_cuspidal_relations(none).empty());
    CuspidalModel inv{12, {{"w", 5, 4}}};
    for (auto P : solve_cuspidal_relations(inv)) CHECK((8 * P) % 12 == 4);
    CHECK_THROWS_AS(solve_cuspidal_relations({21, {{"w", 2, 0}}}), DomainError);
    CHECK_THROWS_AS(solve_cuspidal_relations({21, {{"w", 8, 21}}}), DomainError);
    CHECK_THROWS_AS(solve_cuspidal_relations({2'000'000, {}}), BoundError);
}

TEST_CASE("sieve basics") {
    SieveData full;
    full.primes.push_back({5, {4}, {{0}, {1}, {2}, {3}}, {{1}}, {2}});
    CHECK(mw_sieve_check(full).outcome == SieveOutcome::NotObstructed);

    SieveData trivial;
    trivial.primes.push_back({5, {4}, {{1}}, {{0}}, {2}});
    CHECK(mw_sieve_check(trivial).outcome == SieveOutcome::Obstructed);
    CHECK(mw_sieve_check(trivial, SieveMethod::Prune).outcome == SieveOutcome::Obstructed);

    // Generator images (1) and (1): the diagonal subgroup misses (0, 1).
    SieveData two;
    two.primes.push_back({3, {2}, {{0}}, {{1}}, {0}});
    two.primes.push_back({5, {2}, {{1}}, {{1}}, {0}});
    CHECK(mw_sieve_check(two).outcome == SieveOutcome::Obstructed);
    CHECK(mw_sieve_check(two, SieveMethod::Prune).outcome == SieveOutcome::Obstructed);
    two.primes[1].curve_image = {{0}};
    CHECK(mw_sieve_check(two).outcome == SieveOutcome::NotObstructed);
    CHECK(mw_sieve_check(two, SieveMethod::Prune).outcome == SieveOutcome::NotObstructed);
}

TEST_CASE("sieve data validation and JSON") {
    SieveData d;
    d.primes.push_back({17, {2, 6}, {{0, 1}, {1, 5}}, {{1, 1}, {0, 2}}, {0, 0}});
    d.primes.push_back({31, {10}, {{3}}, {{7}, {4}}, {1}});
    const auto j = to_json(d);
    CHECK(j["primes"] == std::vector<int>{17, 31});
    const auto back = sieve_data_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(mw_sieve_check(back).outcome == naive_sieve(back));

    auto bad = d;
    bad.primes[1].mw_images.pop_back();
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = d;
    bad.primes[0].curve_image.clear();
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = d;
    bad.primes[0].basepoint = {2, 0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = d;
    bad.primes[0].p = 15;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(sieve_data_from_json(nlohmann::json{{"primes", {17}}}), DomainError);
}

TEST_CASE("sieve agrees with full product enumeration") {
    std::mt19937_64 rng(99);
    int obstructed = 0;
    for (int i = 0; i < 300; ++i) {
        const auto data = random_instance(rng);
        const auto want = naive_sieve(data);
        CHECK(mw_sieve_check(data, SieveMethod::Enumerate).outcome == want);
        CHECK(mw_sieve_check(data, SieveMethod::Prune).outcome == want);
        CHECK(mw_sieve_check(data).outcome == want);
        obstructed += want == SieveOutcome::Obstructed;
    }
    MESSAGE("obstructed instances: " << obstructed << " of 300");
    CHECK(obstructed > 20);
    CHECK(obstructed < 280);
}

TEST_CASE("large subgroups go through the pruning sieve") {
    std::mt19937_64 rng(5);
    SieveData d;
    for (std::uint64_t p : {101, 103, 107, 109}) {
        LocalSieveData l;
        l.p = p;
        l.factors = {p - 1, 60};
        for (int g = 0; g < 3; ++g) l.mw_images.push_back(random_element(l.factors, rng));
        for (int c = 0; c < 40; ++c) l.curve_image.push_back(random_element(l.factors, rng));
        l.basepoint = random_element(l.factors, rng);
        d.primes.push_back(l);
    }
    const auto res = mw_sieve_check(d);
    CHECK(res.method == SieveMethod::Prune);
    CHECK_FALSE(res.survivors.empty());
    auto reversed = d;
    std::reverse(reversed.primes.begin(), reversed.primes.end());
    CHECK(mw_sieve_check(reversed).outcome == res.outcome);
    for (auto& l : d.primes) l.curve_image.resize(2);
    auto tight = mw_sieve_check(d);
    std::reverse(d.primes.begin(), d.primes.end());
    CHECK(mw_sieve_check(d).outcome == tight.outcome);
    MESSAGE("pruned survivors per prime: " << res.survivors.size() << " primes, outcome " << to_string(res.outcome));
}
