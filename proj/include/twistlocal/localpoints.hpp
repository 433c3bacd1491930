#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "twistlocal/ntkernel.hpp"

namespace twistlocal::localpoints {

// Twist of X_0(N), N = m_1 ... m_k, by K = Q(sqrt d_1, ..., sqrt d_k), where the
// generator flipping sqrt(d_i) acts through the Atkin-Lehner involution w_{m_i}.
class TwistSpec {
public:
    // Throws DomainError when the tuples violate the construction's requirements.
    TwistSpec(std::vector<std::int64_t> m, std::vector<std::int64_t> d);

    const std::vector<std::int64_t>& m() const { return m_; }
    const std::vector<std::int64_t>& d() const { return d_; }
    std::int64_t N() const { return N_; }
    std::size_t k() const { return m_.size(); }
    int genus() const { return genus_; }
    // 4 g^2 for the genus of X_0(N).
    std::int64_t weil_threshold() const { return 4LL * genus_ * genus_; }
    const std::vector<std::int64_t>& level_primes() const { return level_primes_; }
    // Index i with q | m_i; throws DomainError when q does not divide N.
    std::size_t index_of(std::int64_t q) const;
    // Primes ramified in K.
    std::vector<std::int64_t> ramified_primes() const;

    friend bool operator==(const TwistSpec&, const TwistSpec&) = default;

private:
    std::vector<std::int64_t> m_;
    std::vector<std::int64_t> d_;
    std::int64_t N_ = 1;
    int genus_ = 0;
    std::vector<std::int64_t> level_primes_;
};

// Splitting data of one prime across the quadratic subfields Q(sqrt d_i).
struct InertProfile {
    std::int64_t p = 0;
    std::vector<ntkernel::SplitType> types;  // per index
    std::vector<std::size_t> inert;          // S
    std::vector<std::size_t> ramified_at;
    std::vector<std::size_t> split;
    std::int64_t M = 1;                      // product of m_i over S

    bool in_S(std::size_t i) const;
};

enum class Status { Yes, No, Unknown };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);

namespace criterion {
// Unramified good primes.
inline constexpr std::string_view kSplitCompletely = "split-completely";
inline constexpr std::string_view kAllInert = "all-inert";
inline constexpr std::string_view kWeilBound = "weil-bound";
inline constexpr std::string_view kSupersingularEmbedding = "supersingular-embedding";
inline constexpr std::string_view kOrdinaryCmPoint = "ordinary-cm-point";
// Ramified good primes.
inline constexpr std::string_view kRamifiedHypotheses = "ramified-hypotheses";
inline constexpr std::string_view kRamifiedCmLift = "ramified-cm-lift";
inline constexpr std::string_view kRamifiedLiftAtTwo = "ramified-lift-at-2";
// Primes dividing N.
inline constexpr std::string_view kBadSplitCompletely = "bad-split-completely";
inline constexpr std::string_view kBadRamified = "bad-ramified";
inline constexpr std::string_view kBadInertTwistingFactor = "bad-inert-twisting-factor";
inline constexpr std::string_view kBadInertTwistingFactorAtTwo = "bad-inert-twisting-factor-at-2";
inline constexpr std::string_view kBadSplitTwistingFactor = "bad-split-twisting-factor";
inline constexpr std::string_view kBadSplitTwistingFactorAtTwo = "bad-split-twisting-factor-at-2";
// Aggregate: every good unramified prime above 4 g^2.
inline constexpr std::string_view kWeilBoundTail = "weil-bound-tail";

// Criteria that are necessary and sufficient under their hypotheses; only these may yield No.
bool is_iff(std::string_view id);
}  // namespace criterion

namespace outcome {
inline constexpr std::string_view kPass = "pass";
inline constexpr std::string_view kFail = "fail";
inline constexpr std::string_view kInapplicable = "inapplicable";
}  // namespace outcome

struct TraceEntry {
    std::string criterion;
    std::string outcome;
    std::string detail;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct PrimeVerdict {
    std::int64_t p = 0;
    Status status = Status::Unknown;
    std::vector<TraceEntry> trace;

    friend bool operator==(const PrimeVerdict&, const PrimeVerdict&) = default;
};

struct AggregateVerdict {
    Status status = Status::Unknown;
    std::vector<std::int64_t> unknown_primes;
    std::vector<std::int64_t> checked_primes;
    std::vector<PrimeVerdict> verdicts;
    TraceEntry tail;

    friend bool operator==(const AggregateVerdict&, const AggregateVerdict&) = default;
};

InertProfile inert_profile(const TwistSpec& spec, std::int64_t p);

// p does not divide N and is unramified in K.
PrimeVerdict verdict_good_unramified(const TwistSpec& spec, std::int64_t p);
// p does not divide N and is ramified in some Q(sqrt d_i).
PrimeVerdict verdict_good_ramified(const TwistSpec& spec, std::int64_t p);
// p divides N.
PrimeVerdict verdict_bad(const TwistSpec& spec, std::int64_t p);

enum class Route { GoodUnramified, GoodRamified, Bad };
Route route_for(const TwistSpec& spec, std::int64_t p);

// Dispatches to exactly one of the three verdict routines.
PrimeVerdict verdict_at(const TwistSpec& spec, std::int64_t p);

// The finite set of primes that everywhere_local evaluates individually.
std::vector<std::int64_t> test_primes(const TwistSpec& spec);

AggregateVerdict everywhere_local(const TwistSpec& spec);

nlohmann::json to_json(const TraceEntry& e);
nlohmann::json to_json(const PrimeVerdict& v);
nlohmann::json to_json(const AggregateVerdict& a);
PrimeVerdict prime_verdict_from_json(const nlohmann::json& j);
AggregateVerdict aggregate_from_json(const nlohmann::json& j);

}  // namespace twistlocal::localpoints
