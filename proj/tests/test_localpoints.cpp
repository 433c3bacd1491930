#include "doctest.h"
#include "oracles.hpp"

#include "twistlocal/errors.hpp"
#include "twistlocal/localpoints.hpp"

#include <random>

using namespace twistlocal;
using namespace twistlocal::localpoints;

namespace {

bool trace_has(const PrimeVerdict& v, std::string_view id, std::string_view out) {
    for (const auto& e : v.trace) {
        if (e.criterion == id && e.outcome == out) return true;
    }
    return false;
}

// H(-52) = X^2 - 6896880000 X - 567663552000000, evaluated directly.
bool h52_has_root(std::int64_t p) {
    const __int128 b = static_cast<__int128>(-6896880000LL) % p;
    const __int128 c = static_cast<__int128>(-567663552000000LL) % p;
    for (__int128 x = 0; x < p; ++x) {
        if (((x * x + b * x + c) % p + p) % p == 0) return true;
    }
    return false;
}

std::vector<TwistSpec> random_specs(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TwistSpec> out;
    while (out.size() < count) {
        const std::size_t k = 1 + rng() % 3;
        std::vector<std::int64_t> m, d;
        for (std::size_t i = 0; i < k; ++i) {
            m.push_back(2 + static_cast<std::int64_t>(rng() % 40));
            std::int64_t di = static_cast<std::int64_t>(rng() % 401) - 200;
            d.push_back(di);
        }
        try {
            TwistSpec s(m, d);
            if (s.N() > 700) continue;
            out.push_back(std::move(s));
        } catch (const DomainError&) {
        }
    }
    return out;
}

}  // namespace

TEST_CASE("twist spec validation") {
    CHECK_NOTHROW(TwistSpec({26}, {-29}));
    CHECK_NOTHROW(TwistSpec({13, 2}, {5, -1}));
    CHECK_THROWS_AS(TwistSpec({26}, {0}), DomainError);
    CHECK_THROWS_AS(TwistSpec({26}, {1}), DomainError);
    CHECK_THROWS_AS(TwistSpec({26}, {12}), DomainError);
    CHECK_THROWS_AS(TwistSpec({12}, {5}), DomainError);
    CHECK_THROWS_AS(TwistSpec({1}, {5}), DomainError);
    CHECK_THROWS_AS(TwistSpec({13, 26}, {5, -1}), DomainError);
    CHECK_THROWS_AS(TwistSpec({13, 2}, {5, 5}), DomainError);
    CHECK_THROWS_AS(TwistSpec({13, 2}, {5, 15}), DomainError);
    CHECK_THROWS_AS(TwistSpec({13, 2}, {5}), DomainError);
    CHECK_THROWS_AS(TwistSpec({}, {}), DomainError);
    const TwistSpec s({13, 2}, {5, -1});
    CHECK(s.N() == 26);
    CHECK(s.genus() == 2);
    CHECK(s.weil_threshold() == 16);
    CHECK(s.index_of(2) == 1);
    CHECK_THROWS_AS(s.index_of(3), DomainError);
    CHECK(s.ramified_primes() == std::vector<std::int64_t>{2, 5});
}

TEST_CASE("inert profiles") {
    const TwistSpec a({26}, {-1});
    auto p3 = inert_profile(a, 3);
    CHECK(p3.inert == std::vector<std::size_t>{0});
    CHECK(p3.M == 26);
    auto p5 = inert_profile(a, 5);
    CHECK(p5.inert.empty());
    CHECK(p5.M == 1);
    const TwistSpec b({13, 2}, {5, -1});
    auto q5 = inert_profile(b, 5);
    CHECK(q5.ramified_at == std::vector<std::size_t>{0});
    CHECK(q5.split == std::vector<std::size_t>{1});
}

TEST_CASE("good unramified primes") {
    const TwistSpec a({26}, {-1});
    auto v3 = verdict_good_unramified(a, 3);
    CHECK(v3.status == Status::Yes);
    CHECK(trace_has(v3, criterion::kAllInert, outcome::kPass));
    auto v5 = verdict_good_unramified(a, 5);
    CHECK(v5.status == Status::Yes);
    CHECK(trace_has(v5, criterion::kSplitCompletely, outcome::kPass));
    const TwistSpec b({26}, {-29});
    CHECK(verdict_good_unramified(b, 101).status == Status::Yes);
    // 17 is inert in Q(sqrt 5), split in Q(i), and above 4g^2 = 16.
    const TwistSpec c({13, 2}, {5, -1});
    auto v17 = verdict_good_unramified(c, 17);
    CHECK(v17.status == Status::Yes);
    CHECK(trace_has(v17, criterion::kWeilBound, outcome::kPass));
    CHECK_THROWS(verdict_good_unramified(b, 13));
    CHECK_THROWS(verdict_good_unramified(b, 29));
}

TEST_CASE("good ramified primes follow the class polynomial root test") {
    int yes = 0, no = 0;
    for (std::int64_t p = 5; p < 400 && (yes < 5 || no < 5); p += 4) {
        if (!oracle::is_prime(p) || p == 13) continue;
        // d_1 = p ramifies only at p; -1 splits at p = 1 mod 4.
        const TwistSpec s({13, 2}, {p, -1});
        const auto v = verdict_good_ramified(s, p);
        const bool root = h52_has_root(p);
        CHECK_MESSAGE(v.status == (root ? Status::Yes : Status::No), "p = " << p);
        CHECK(trace_has(v, criterion::kRamifiedCmLift, root ? outcome::kPass : outcome::kFail));
        (root ? yes : no)++;
    }
    CHECK(yes >= 5);
    CHECK(no >= 5);

    // Ramified in one field, inert in the other.
    const TwistSpec s({13, 2}, {5, 2});
    CHECK(verdict_good_ramified(s, 5).status == Status::Unknown);
    CHECK_THROWS_AS(verdict_good_ramified(s, 3), DispatchError);
    CHECK_THROWS_AS(verdict_good_ramified(s, 13), DispatchError);
}

TEST_CASE("good ramified prime 2 relies on the lifting lemma") {
    const TwistSpec s({13, 5}, {-1, 17});
    const auto v = verdict_good_ramified(s, 2);
    CHECK(v.status == Status::Yes);
    CHECK(trace_has(v, criterion::kRamifiedLiftAtTwo, outcome::kPass));
}

TEST_CASE("bad primes") {
    const TwistSpec two({26}, {2});
    const auto v = verdict_bad(two, 13);
    CHECK(v.status == Status::No);
    CHECK(trace_has(v, criterion::kBadInertTwistingFactor, outcome::kFail));
    const TwistSpec mi({26}, {-1});
    CHECK(verdict_bad(mi, 13).status == Status::Yes);
    CHECK(trace_has(verdict_bad(mi, 13), criterion::kBadSplitCompletely, outcome::kPass));
    CHECK(verdict_bad(mi, 2).status == Status::Unknown);
    CHECK_THROWS_AS(verdict_bad(mi, 3), DispatchError);

    // 7 = 3 mod 4 inert in Q(sqrt 5), N/7 = 2 * 5 with 5 = 1 mod 4 in another factor.
    const TwistSpec ok({7, 10}, {5, 2});
    REQUIRE(ntkernel::splitting(7, 5) == ntkernel::SplitType::Inert);
    REQUIRE(ntkernel::splitting(7, 2) == ntkernel::SplitType::Split);
    CHECK(verdict_bad(ok, 7).status == Status::Yes);
    // Same shape but 7 also inert in the second field: S is not {i0}.
    const TwistSpec wide({7, 10}, {5, 3});
    REQUIRE(ntkernel::splitting(7, 3) == ntkernel::SplitType::Inert);
    CHECK(verdict_bad(wide, 7).status == Status::No);
}

TEST_CASE("aggregate verdicts for level 26") {
    for (std::int64_t d : {-29, -23, 23, 29, -79}) {
        const auto a = everywhere_local(TwistSpec({26}, {d}));
        CHECK_MESSAGE(a.status != Status::No, "d = " << d);
        for (const auto& v : a.verdicts) CHECK(v.status != Status::No);
    }
    const auto bad = everywhere_local(TwistSpec({26}, {2}));
    CHECK(bad.status == Status::No);
    const auto mi = everywhere_local(TwistSpec({26}, {-1}));
    for (const auto& v : mi.verdicts) {
        if (v.p == 13 || v.p == 5) CHECK(v.status != Status::No);
    }
    CHECK(bad.tail.criterion == criterion::kWeilBoundTail);
}

TEST_CASE("test prime set") {
    const TwistSpec s({26}, {-29});
    const auto ps = test_primes(s);
    CHECK(ps == std::vector<std::int64_t>{2, 3, 5, 7, 11, 13, 29});
}

TEST_CASE("soundness, dispatch totality and aggregation on random specs") {
    const auto specs = random_specs(100, 2024);
    const auto primes = ntkernel::primes_up_to(1000);
    for (const auto& s : specs) {
        for (std::int64_t p : primes) {
            const Route r = route_for(s, p);
            int ok = 0;
            try { verdict_good_unramified(s, p); ++ok; } catch (const std::logic_error&) {}
            try { verdict_good_ramified(s, p); ++ok; } catch (const std::logic_error&) {}
            try { verdict_bad(s, p); ++ok; } catch (const std::logic_error&) {}
            REQUIRE(ok == 1);
            const auto v = verdict_at(s, p);
            CHECK(v.p == p);
            REQUIRE_FALSE(v.trace.empty());
            if (v.status == Status::No) {
                bool cited = false;
                for (const auto& e : v.trace) cited |= criterion::is_iff(e.criterion) && e.outcome == outcome::kFail;
                CHECK(cited);
            }
            if (v.status == Status::Yes) {
                bool passed = false;
                for (const auto& e : v.trace) passed |= e.outcome == outcome::kPass;
                CHECK(passed);
            }
            if (r == Route::Bad) CHECK(s.N() % p == 0);
        }
        const auto a = everywhere_local(s);
        bool any_no = false, all_yes = true;
        for (const auto& v : a.verdicts) {
            any_no |= v.status == Status::No;
            all_yes &= v.status == Status::Yes;
        }
        CHECK(a.status == (any_no ? Status::No : all_yes ? Status::Yes : Status::Unknown));
        CHECK(aggregate_from_json(to_json(a)) == a);
        for (const auto& v : a.verdicts) CHECK(prime_verdict_from_json(to_json(v)) == v);
    }
}

TEST_CASE("status strings") {
    for (auto s : {Status::Yes, Status::No, Status::Unknown}) CHECK(parse_status(to_string(s)) == s);
    CHECK_FALSE(parse_status("maybe"));
}
