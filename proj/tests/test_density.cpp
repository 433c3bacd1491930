#include "doctest.h"
#include "oracles.hpp"

#include "twistlocal/errors.hpp"
#include "twistlocal/localpoints.hpp"
#include "twistlocal/twistsearch.hpp"

#include <cmath>

using namespace twistlocal;
using namespace twistlocal::twistsearch;

namespace {

constexpr std::int64_t kM1 = 5;
constexpr std::int64_t kM2 = 13;
constexpr std::int64_t kD1 = 23616331489LL;

// Membership in S_N for m2 = 13 without the library: H(-52) = X^2 + bX + c has a root
// mod odd p iff b^2 - 4c is a square mod p; p = 2 by evaluating at 0 and 1.
bool member_oracle(std::int64_t p) {
    const __int128 b = -6896880000LL, c = -567663552000000LL;
    bool root;
    if (p == 2) {
        const auto bb = ((b % 2) + 2) % 2, cc = ((c % 2) + 2) % 2;
        root = cc == 0 || (1 + bb + cc) % 2 == 0;
    } else {
        const __int128 disc = b * b - 4 * c;
        root = oracle::euler(static_cast<std::int64_t>(((disc % p) + p) % p), p) != -1;
    }
    if (!root) return false;
    if (p == 2) return kD1 % 8 == 1;
    return oracle::euler(kD1 % p, p) == 1;
}

// disc(H(-52)) = 2^18 3^12 5^6 13 41^2
bool regular_oracle(std::int64_t p) { return member_oracle(p) && p != 2 && p != 3 && p != 5 && p != 13 && p != 41; }

bool counted_oracle(std::int64_t n) {
    if (n <= 1 || n % 4 != 1 || !oracle::squarefree(n)) return false;
    for (auto q : oracle::prime_factors(static_cast<std::uint64_t>(n))) {
        const auto p = static_cast<std::int64_t>(q);
        if (p == kM1 || p == kM2 || kD1 % p == 0 || !regular_oracle(p)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("preflight accepts the fixture and names failures") {
    const auto ok = density_preflight(kM1, kM2, kD1);
    CHECK_MESSAGE(ok.ok(), ok.failures());
    const auto bad8 = density_preflight(5, 17, kD1);
    CHECK_FALSE(bad8.ok());
    CHECK(bad8.failures().find("m1 = m2 mod 8") != std::string::npos);
    const auto small = density_preflight(kM1, kM2, 29);
    CHECK_FALSE(small.ok());
    CHECK(small.failures().find("2 splits") != std::string::npos);
    const auto composite = density_preflight(kM1, kM2, 21);
    CHECK_FALSE(composite.ok());
    const auto res = count_A_prime(5, 17, kD1, 1000);
    CHECK_FALSE(res.report);
}

TEST_CASE("smallest admissible d1 for (5, 13)") {
    CHECK(smallest_admissible_d1(kM1, kM2, 1'000'000'000) == std::nullopt);
    CHECK(smallest_admissible_d1(kM1, kM2, 30'000'000'000LL) == kD1);
}

TEST_CASE("Chebotarev set membership") {
    const ChebotarevSet S(kM2, kD1);
    const auto primes = ntkernel::primes_up_to(71);
    REQUIRE(primes.size() == 20);
    for (auto p : primes) {
        CHECK_MESSAGE(S.contains(p) == member_oracle(p), "p = " << p);
        CHECK_MESSAGE(S.contains_regular(p) == regular_oracle(p), "p = " << p);
    }
    // H(-52) has a double root mod 41 although 41 is inert in Q(sqrt 13).
    CHECK(S.contains(41));
    CHECK_FALSE(S.contains_regular(41));
    CHECK_THROWS_AS(chebotarev_sample(kM2, kD1, 1000), DomainError);
    const auto sample = chebotarev_sample(kM2, kD1, 100'000);
    std::uint64_t members = 0;
    for (auto p : ntkernel::primes_up_to(100'000)) members += member_oracle(p);
    CHECK(sample.members == members);
    CHECK(sample.primes == 9592);
}

TEST_CASE("class number one gives density one half") {
    // H(-8) is linear, so only the Kronecker condition remains.
    const auto s = chebotarev_sample(2, 5, 1'000'000);
    MESSAGE("alpha_hat for m2 = 2, d1 = 5: " << s.alpha_hat);
    CHECK(std::abs(s.alpha_hat - 0.5) < 0.02);
}

TEST_CASE("A' counting agrees with brute force") {
    const std::uint64_t X = 30000;
    APrimeCounter counter(kM1, kM2, kD1, X);
    std::uint64_t brute = 0;
    std::vector<std::int64_t> first;
    for (std::int64_t n = 1; n <= static_cast<std::int64_t>(X); ++n) {
        if (counted_oracle(n)) {
            ++brute;
            if (first.size() < 25) first.push_back(n);
        }
    }
    CHECK(counter.count(X, 1) == brute);
    CHECK(counter.members(1, X + 1, 25) == first);
    CHECK(counter.count(first.front() - 1, 1) == 0);
}

TEST_CASE("partitioned counts are deterministic and monotone") {
    const std::uint64_t X = 2'000'000;
    APrimeCounter counter(kM1, kM2, kD1, X);
    const auto whole = counter.count_range(1, X + 1);
    CHECK(counter.count(X, 1) == whole);
    CHECK(counter.count(X, 3) == whole);
    CHECK(counter.count(X, 8) == whole);
    std::uint64_t parts = 0;
    for (std::uint64_t lo = 1; lo <= X; lo += 123457) parts += counter.count_range(lo, std::min(X + 1, lo + 123457));
    CHECK(parts == whole);
    std::uint64_t prev = 0;
    for (std::uint64_t x = 100'000; x <= X; x += 100'000) {
        const auto c = counter.count(x, 2);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK_THROWS_AS(counter.count(X + 1), DomainError);
}

TEST_CASE("counted d2 give twists without local obstructions") {
    const auto res = count_A_prime(kM1, kM2, kD1, 100'000, 100'000);
    REQUIRE(res.report);
    const auto& r = *res.report;
    REQUIRE(r.smallest.size() == 10);
    for (auto d2 : r.smallest) {
        const auto agg = localpoints::everywhere_local(localpoints::TwistSpec({kM1, kM2}, {kD1, d2}));
        CHECK_MESSAGE(agg.status != localpoints::Status::No, "d2 = " << d2);
    }
    REQUIRE(r.counts.size() == 3);
    CHECK(r.counts[0].first == 10'000);
    CHECK(r.counts[1].first == 33'333);
    CHECK(r.counts[2].first == 100'000);
    CHECK(r.counts[0].second <= r.counts[1].second);
    CHECK(r.counts[1].second <= r.counts[2].second);
    const auto csv = to_csv(r);
    CHECK(csv.rfind("X,count,c_hat\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(r.header.find("gcd(d2, m1 m2 d1) = 1") != std::string::npos);
}

TEST_CASE("first hundred counted d2 never produce a local obstruction") {
    APrimeCounter counter(kM1, kM2, kD1, 100'000);
    const auto ds = counter.members(1, 100'001, 100);
    REQUIRE(ds.size() == 100);
    for (auto d2 : ds) {
        const auto agg = localpoints::everywhere_local(localpoints::TwistSpec({kM1, kM2}, {kD1, d2}));
        CHECK_MESSAGE(agg.status != localpoints::Status::No, "d2 = " << d2);
    }
}
