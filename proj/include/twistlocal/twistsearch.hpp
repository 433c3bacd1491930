#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistlocal/classpoly.hpp"
#include "twistlocal/localpoints.hpp"

namespace twistlocal::twistsearch {

// Enumeration of d-tuples whose twists have local points everywhere.
struct SearchConfig {
    std::vector<std::int64_t> m;
    std::int64_t bound = 100;  // max |d_i|
    std::size_t limit = 10;    // max tuples to emit
    // Re-run the verdict engine on every tuple that passes the filters.
    bool reverify = true;

    void validate() const;
};

struct SearchHit {
    std::vector<std::int64_t> d;
    localpoints::AggregateVerdict verdict;
    std::string trace_digest;
};

struct SearchDiagnostics {
    std::size_t candidates = 0;          // admissible single d values, summed over indices
    std::size_t tuples_examined = 0;
    std::size_t rejected_disjoint_ramification = 0;
    std::size_t rejected_small_primes = 0;
    std::size_t rejected_ramified_large = 0;
    std::size_t rejected_invalid_spec = 0;
    std::size_t suppressed = 0;          // filtered tuples whose verdict was not Yes
    std::size_t emitted = 0;
};

// Streams hits to sink in deterministic order; sink returns false to stop early.
SearchDiagnostics enumerate_twists(const SearchConfig& config, const std::function<bool(const SearchHit&)>& sink);

std::vector<SearchHit> enumerate_twists(const SearchConfig& config, SearchDiagnostics* diagnostics = nullptr);

// 16 hex digits of FNV-1a over the serialized verdict.
std::string trace_digest(const localpoints::AggregateVerdict& verdict);

nlohmann::json to_json(const SearchHit& hit);

// ---------------------------------------------------------------------------
// Density of biquadratic twists of X_0(m1 m2) with local points everywhere.

struct PreflightCheck {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct Preflight {
    std::vector<PreflightCheck> checks;
    bool ok() const;
    std::string failures() const;
};

// Standing hypotheses on (m1, m2, d1) under which every counted d2 gives local points everywhere.
Preflight density_preflight(std::int64_t m1, std::int64_t m2, std::int64_t d1);

// Smallest d1 <= limit passing density_preflight, if any.
std::optional<std::int64_t> smallest_admissible_d1(std::int64_t m1, std::int64_t m2, std::int64_t limit);

// Membership in S_N: H(-4 m2) has a root mod p and (d1/p) = 1.
class ChebotarevSet {
public:
    ChebotarevSet(std::int64_t m2, std::int64_t d1);
    bool contains(std::uint64_t p) const;
    // Members where H(-4 m2) is also separable mod p. A repeated root does not give a
    // degree one prime of Q(j) above p, so the finitely many p dividing disc(H) are
    // dropped; the density is unchanged.
    bool contains_regular(std::uint64_t p) const;
    std::int64_t m2() const { return m2_; }
    std::int64_t d1() const { return d1_; }

private:
    std::int64_t m2_;
    std::int64_t d1_;
    std::shared_ptr<const classpoly::HilbertClassPoly> poly_;
};

struct ChebotarevSample {
    std::uint64_t bound = 0;
    std::uint64_t primes = 0;
    std::uint64_t members = 0;
    double alpha_hat = 0.0;
};

// Fraction of primes p <= B lying in S_N. Requires B >= 1e5.
ChebotarevSample chebotarev_sample(std::int64_t m2, std::int64_t d1, std::uint64_t B);

struct DensityReport {
    double alpha_hat = 0.0;
    std::uint64_t sample_bound = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;  // (X, |A'(X)|)
    std::vector<std::pair<std::uint64_t, double>> c_trajectory;   // (X, |A'(X)| log(X)^{1-alpha} / X)
    std::vector<std::int64_t> smallest;                           // first counted d2 values
    std::string header;
};

struct DensityResult {
    Preflight preflight;
    std::optional<DensityReport> report;
};

// Counts squarefree d2 <= X, d2 = 1 mod 4, d2 > 1, coprime to m1 m2 d1, all of whose primes
// lie in S_N and are regular in the sense of ChebotarevSet::contains_regular.
class APrimeCounter {
public:
    APrimeCounter(std::int64_t m1, std::int64_t m2, std::int64_t d1, std::uint64_t X);
    // Count over [lo, hi) with 1 <= lo <= hi <= X + 1; partial counts add.
    std::uint64_t count_range(std::uint64_t lo, std::uint64_t hi) const;
    // Counted values in [lo, hi), ascending.
    std::vector<std::int64_t> members(std::uint64_t lo, std::uint64_t hi, std::size_t max_items) const;
    std::uint64_t count(std::uint64_t upto, unsigned threads = 0) const;

private:
    std::uint64_t X_;
    std::vector<std::uint32_t> primes_;
    std::vector<bool> excluded_;  // per entry of primes_
};

DensityResult count_A_prime(std::int64_t m1, std::int64_t m2, std::int64_t d1, std::uint64_t X,
                            std::uint64_t B = 1'000'000, unsigned threads = 0);

// CSV with header "X,count,c_hat".
std::string to_csv(const DensityReport& report);

}  // namespace twistlocal::twistsearch
