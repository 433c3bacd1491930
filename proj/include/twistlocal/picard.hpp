#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace twistlocal::picard {

// Order of the cusp divisor (0) - (inf) on X_0(N), N prime > 3.
std::uint64_t cusp_order_prime(std::uint64_t N);

// Q (p - 1) / 12 with Q = prod (q + 1), for level p * prod q. Only defined when some q is
// not 1 mod 4 and some q is not 1 mod 3, and the quotient is exact; DomainError otherwise.
std::uint64_t cusp_order_composite(std::uint64_t p, const std::vector<std::uint64_t>& qs);

enum class Pic1 { Empty, NonemptyClass, Unknown };
std::string_view to_string(Pic1 v);

struct Pic1Verdict {
    Pic1 value = Pic1::Unknown;
    std::string reason;
};

Pic1Verdict pic1_verdict_prime(std::uint64_t N, bool inert_at_N);
Pic1Verdict pic1_verdict_composite(std::uint64_t p, const std::vector<std::uint64_t>& qs, bool inert_at_p);

// Relations (1 - u) P = t in Z/n, one per involution.
struct Relation {
    std::string label;
    std::uint64_t multiplier = 1;
    std::uint64_t target = 0;
};

struct CuspidalModel {
    std::uint64_t n = 1;
    std::vector<Relation> relations;

    void validate() const;
};

constexpr std::uint64_t kMaxCuspidalOrder = 1'000'000;

// All P in Z/n satisfying every relation, ascending.
std::vector<std::uint64_t> solve_cuspidal_relations(const CuspidalModel& model);

// ---------------------------------------------------------------------------
// Intersection test for reduction images across finitely many primes.

using Element = std::vector<std::uint64_t>;  // coordinates in prod Z/factors[j]

struct LocalSieveData {
    std::uint64_t p = 0;
    std::vector<std::uint64_t> factors;
    std::vector<Element> curve_image;
    std::vector<Element> mw_images;  // one per generator
    Element basepoint;
};

struct SieveData {
    std::vector<LocalSieveData> primes;

    void validate() const;
    std::size_t generator_count() const { return primes.empty() ? 0 : primes.front().mw_images.size(); }
};

SieveData sieve_data_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SieveData& data);

enum class SieveOutcome { Obstructed, NotObstructed };
std::string_view to_string(SieveOutcome v);

enum class SieveMethod { Auto, Enumerate, Prune };

struct SieveResult {
    SieveOutcome outcome = SieveOutcome::NotObstructed;
    SieveMethod method = SieveMethod::Auto;  // the method actually used
    std::uint64_t subgroup_size = 0;         // when enumerated
    std::vector<std::uint64_t> survivors;    // survivors after each prime when pruned
};

constexpr std::uint64_t kMaxSubgroup = 10'000'000;

// Obstructed iff no h in the subgroup generated by the generator images has
// h + basepoint in the curve image at every prime.
SieveResult mw_sieve_check(const SieveData& data, SieveMethod method = SieveMethod::Auto);

}  // namespace twistlocal::picard
