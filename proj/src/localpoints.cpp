#include "twistlocal/localpoints.hpp"

#include "twistlocal/classpoly.hpp"
#include "twistlocal/errors.hpp"

#include <algorithm>
#include <bitset>
#include <limits>
#include <set>
#include <sstream>

namespace twistlocal::localpoints {

using ntkernel::SplitType;

namespace {

std::string join(const std::vector<std::size_t>& idx) {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i] + 1;
    out << "}";
    return out.str();
}

bool is_odd_prime_1_mod_4_product(std::int64_t n) {
    for (auto q : ntkernel::factor(static_cast<std::uint64_t>(n)).primes()) {
        if (q % 4 != 1) return false;
    }
    return true;
}

std::string_view pass_fail(bool ok) { return ok ? outcome::kPass : outcome::kFail; }

void require_prime(std::int64_t p) {
    if (p < 2 || !ntkernel::is_prime(static_cast<std::uint64_t>(p))) {
        throw DomainError(std::to_string(p) + " is not prime");
    }
}

// The d_i are independent in Q^*/Q^*^2: no nonempty sub-product is a square.
bool independent_mod_squares(const std::vector<std::int64_t>& d) {
    // Rows are exponent-parity vectors over (sign, primes...), reduced over GF(2).
    std::vector<std::int64_t> primes;
    std::vector<std::vector<std::int64_t>> row_primes;
    for (auto v : d) {
        auto f = ntkernel::factor(v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v));
        row_primes.push_back(f.primes());
        for (auto q : row_primes.back()) primes.push_back(q);
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    const std::size_t width = primes.size() + 1;
    std::vector<std::vector<bool>> rows;
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<bool> r(width, false);
        r[0] = d[i] < 0;
        for (auto q : row_primes[i]) {
            r[1 + (std::lower_bound(primes.begin(), primes.end(), q) - primes.begin())] = true;
        }
        rows.push_back(std::move(r));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < width && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !rows[pivot][col]) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[pivot], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && rows[r][col]) {
                for (std::size_t c = 0; c < width; ++c) rows[r][c] = rows[r][c] != rows[rank][c];
            }
        }
        ++rank;
    }
    return rank == d.size();
}

}  // namespace

TwistSpec::TwistSpec(std::vector<std::int64_t> m, std::vector<std::int64_t> d) : m_(std::move(m)), d_(std::move(d)) {
    if (m_.empty()) throw DomainError("twist needs at least one level factor");
    if (m_.size() != d_.size()) throw DomainError("m and d must have the same length");
    if (m_.size() > 32) throw DomainError("at most 32 quadratic factors are supported");
    for (std::size_t i = 0; i < m_.size(); ++i) {
        if (m_[i] < 2) throw DomainError("m_" + std::to_string(i + 1) + " must be at least 2");
        if (!ntkernel::is_squarefree(m_[i])) throw DomainError("m_" + std::to_string(i + 1) + " = " + std::to_string(m_[i]) + " is not squarefree");
        if (d_[i] == 0 || d_[i] == 1) throw DomainError("d_" + std::to_string(i + 1) + " must not be 0 or 1");
        if (d_[i] == std::numeric_limits<std::int64_t>::min()) throw DomainError("d_" + std::to_string(i + 1) + " out of range");
        if (!ntkernel::is_squarefree(d_[i])) throw DomainError("d_" + std::to_string(i + 1) + " = " + std::to_string(d_[i]) + " is not squarefree");
        for (std::size_t j = 0; j < i; ++j) {
            if (ntkernel::gcd(m_[i], m_[j]) != 1) throw DomainError("level factors must be pairwise coprime");
            if (ntkernel::gcd(d_[i], d_[j]) != 1) throw DomainError("d values must be pairwise coprime");
        }
        if (__builtin_mul_overflow(N_, m_[i], &N_)) throw DomainError("N overflows 64 bits");
    }
    if (!independent_mod_squares(d_)) throw DomainError("d values are dependent modulo squares; K would have degree < 2^k");
    level_primes_ = ntkernel::factor(static_cast<std::uint64_t>(N_)).primes();
    genus_ = ntkernel::genus_x0(static_cast<std::uint64_t>(N_));
}

std::size_t TwistSpec::index_of(std::int64_t q) const {
    for (std::size_t i = 0; i < m_.size(); ++i) {
        if (m_[i] % q == 0) return i;
    }
    throw DomainError(std::to_string(q) + " does not divide N = " + std::to_string(N_));
}

std::vector<std::int64_t> TwistSpec::ramified_primes() const {
    std::set<std::int64_t> out;
    for (auto v : d_) {
        const std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
        for (auto q : ntkernel::factor(mag).primes()) out.insert(q);
        if (ntkernel::field_discriminant(v) % 2 == 0) out.insert(2);
    }
    return {out.begin(), out.end()};
}

bool InertProfile::in_S(std::size_t i) const {
    return std::find(inert.begin(), inert.end(), i) != inert.end();
}

std::string_view to_string(Status s) {
    switch (s) {
    case Status::Yes: return "Yes";
    case Status::No: return "No";
    case Status::Unknown: return "Unknown";
    }
    return "?";
}

std::optional<Status> parse_status(std::string_view s) {
    if (s == "Yes") return Status::Yes;
    if (s == "No") return Status::No;
    if (s == "Unknown") return Status::Unknown;
    return std::nullopt;
}

bool criterion::is_iff(std::string_view id) {
    return id == kRamifiedCmLift || id == kBadInertTwistingFactor;
}

InertProfile inert_profile(const TwistSpec& spec, std::int64_t p) {
    require_prime(p);
    InertProfile prof;
    prof.p = p;
    for (std::size_t i = 0; i < spec.k(); ++i) {
        const SplitType t = ntkernel::splitting(p, spec.d()[i]);
        prof.types.push_back(t);
        switch (t) {
        case SplitType::Split: prof.split.push_back(i); break;
        case SplitType::Inert:
            prof.inert.push_back(i);
            prof.M *= spec.m()[i];
            break;
        case SplitType::Ramified: prof.ramified_at.push_back(i); break;
        }
    }
    return prof;
}

Route route_for(const TwistSpec& spec, std::int64_t p) {
    require_prime(p);
    if (spec.N() % p == 0) return Route::Bad;
    for (auto v : spec.d()) {
        if (ntkernel::splitting(p, v) == SplitType::Ramified) return Route::GoodRamified;
    }
    return Route::GoodUnramified;
}

PrimeVerdict verdict_good_unramified(const TwistSpec& spec, std::int64_t p) {
    if (route_for(spec, p) != Route::GoodUnramified) {
        throw DomainError("verdict_good_unramified: p = " + std::to_string(p) + " divides N or ramifies in K");
    }
    const InertProfile prof = inert_profile(spec, p);
    PrimeVerdict v{p, Status::Unknown, {}};
    auto record = [&](std::string_view id, bool ok, std::string detail) {
        v.trace.push_back({std::string(id), std::string(pass_fail(ok)), std::move(detail)});
        if (ok) v.status = Status::Yes;
        return ok;
    };

    if (record(criterion::kSplitCompletely, prof.inert.empty(), "S = " + join(prof.inert))) return v;
    if (record(criterion::kAllInert, prof.inert.size() == spec.k(), "S = " + join(prof.inert))) return v;
    const std::int64_t bound = spec.weil_threshold();
    if (record(criterion::kWeilBound, p > bound, "4g^2 = " + std::to_string(bound))) return v;

    // (-pM / p_j) = 1 for every p_j | N whose factor lies outside S.
    bool embedding = true;
    std::string failing;
    for (auto q : spec.level_primes()) {
        if (prof.in_S(spec.index_of(q))) continue;
        const int sym = ntkernel::kronecker_symbol(-1, q) * ntkernel::kronecker_symbol(p, q) * ntkernel::kronecker_symbol(prof.M, q);
        if (sym != 1) {
            embedding = false;
            failing = "(-pM/" + std::to_string(q) + ") = " + std::to_string(sym);
            break;
        }
    }
    if (record(criterion::kSupersingularEmbedding, embedding, embedding ? "M = " + std::to_string(prof.M) : failing)) return v;

    if (p == 2) {
        record(criterion::kOrdinaryCmPoint, prof.M == 7, "p = 2 requires M = 7; M = " + std::to_string(prof.M));
        return v;
    }
    if (ntkernel::kronecker_symbol(-prof.M, p) != 1) {
        record(criterion::kOrdinaryCmPoint, false, "(-M/p) != 1 with M = " + std::to_string(prof.M));
        return v;
    }
    try {
        const bool root = classpoly::has_root_mod_p(-4 * prof.M, static_cast<std::uint64_t>(p));
        record(criterion::kOrdinaryCmPoint, root, "H(" + std::to_string(-4 * prof.M) + ") " + (root ? "has" : "has no") + " root mod p");
    } catch (const BoundError& e) {
        v.trace.push_back({std::string(criterion::kOrdinaryCmPoint), std::string(outcome::kInapplicable), e.what()});
    }
    return v;
}

PrimeVerdict verdict_good_ramified(const TwistSpec& spec, std::int64_t p) {
    const Route r = route_for(spec, p);
    if (r != Route::GoodRamified) {
        throw DispatchError("verdict_good_ramified: p = " + std::to_string(p) +
                            (r == Route::Bad ? " divides N" : " is unramified in K"));
    }
    const InertProfile prof = inert_profile(spec, p);
    PrimeVerdict v{p, Status::Unknown, {}};
    if (prof.ramified_at.size() != 1 || !prof.inert.empty()) {
        std::string why = prof.ramified_at.size() != 1 ? "ramified at " + join(prof.ramified_at) : "inert at " + join(prof.inert);
        v.trace.push_back({std::string(criterion::kRamifiedHypotheses), std::string(outcome::kFail),
                           why + "; need exactly one ramified factor and splitting elsewhere"});
        return v;
    }
    const std::size_t i0 = prof.ramified_at.front();
    const std::int64_t M = spec.m()[i0];
    v.trace.push_back({std::string(criterion::kRamifiedHypotheses), std::string(outcome::kPass),
                       "ramified only at " + join(prof.ramified_at)});
    if (p == 2) {
        v.status = Status::Yes;
        v.trace.push_back({std::string(criterion::kRamifiedLiftAtTwo), std::string(outcome::kPass),
                           "M bound to m_" + std::to_string(i0 + 1) + " = " + std::to_string(M) +
                               "; relies on the external CM lifting lemma at 2"});
        return v;
    }
    const std::int64_t D = -4 * M;
    const std::string binding = "M bound to m_" + std::to_string(i0 + 1) + " = " + std::to_string(M);
    try {
        const bool root = classpoly::has_root_mod_p(D, static_cast<std::uint64_t>(p));
        v.status = root ? Status::Yes : Status::No;
        v.trace.push_back({std::string(criterion::kRamifiedCmLift), std::string(pass_fail(root)),
                           binding + "; H(" + std::to_string(D) + ") " + (root ? "has" : "has no") + " root mod p"});
    } catch (const BoundError& e) {
        v.trace.push_back({std::string(criterion::kRamifiedCmLift), std::string(outcome::kInapplicable), binding + "; " + e.what()});
    }
    return v;
}

PrimeVerdict verdict_bad(const TwistSpec& spec, std::int64_t p) {
    require_prime(p);
    if (spec.N() % p != 0) throw DispatchError("verdict_bad: p = " + std::to_string(p) + " does not divide N");
    const InertProfile prof = inert_profile(spec, p);
    const std::size_t i0 = spec.index_of(p);
    const std::int64_t N = spec.N();
    PrimeVerdict v{p, Status::Unknown, {}};
    auto push = [&](std::string_view id, std::string_view out, std::string detail) {
        v.trace.push_back({std::string(id), std::string(out), std::move(detail)});
    };

    if (prof.inert.empty() && prof.ramified_at.empty()) {
        v.status = Status::Yes;
        push(criterion::kBadSplitCompletely, outcome::kPass, "K embeds in Q_p");
        return v;
    }
    push(criterion::kBadSplitCompletely, outcome::kFail, "S = " + join(prof.inert));
    if (!prof.ramified_at.empty()) {
        push(criterion::kBadRamified, outcome::kInapplicable, "ramified at " + join(prof.ramified_at));
        return v;
    }

    if (prof.in_S(i0)) {
        const std::int64_t rest = N / p;
        const std::int64_t odd_rest = rest % 2 == 0 ? rest / 2 : rest;
        if (p != 2) {
            std::vector<std::string> failures;
            if (p % 4 != 3) failures.push_back("p = " + std::to_string(p % 4) + " mod 4");
            if (prof.inert.size() != 1) failures.push_back("S = " + join(prof.inert) + " is not {" + std::to_string(i0 + 1) + "}");
            for (auto q : ntkernel::factor(static_cast<std::uint64_t>(odd_rest)).primes()) {
                if (q % 4 != 1) failures.push_back(std::to_string(q) + " = 3 mod 4");
                if (spec.index_of(q) == i0) failures.push_back(std::to_string(q) + " shares the twisting factor of p");
            }
            const bool ok = failures.empty();
            v.status = ok ? Status::Yes : Status::No;
            std::string detail = "N/p = " + std::to_string(rest);
            for (const auto& f : failures) detail += "; " + f;
            push(criterion::kBadInertTwistingFactor, pass_fail(ok), detail);
            return v;
        }
        const bool shape = rest % 2 == 1 && is_odd_prime_1_mod_4_product(rest);
        const bool s_ok = prof.inert.size() == spec.k() || prof.inert.size() == 1;
        const bool ok = shape && s_ok;
        if (ok) v.status = Status::Yes;
        push(criterion::kBadInertTwistingFactorAtTwo, ok ? outcome::kPass : outcome::kInapplicable,
             "N/2 = " + std::to_string(rest) + ", S = " + join(prof.inert));
        return v;
    }

    // p splits in the field twisted by w_p.
    const std::int64_t M = prof.M;
    const bool m_ok = is_odd_prime_1_mod_4_product(M) && M % 2 == 1;
    if (p != 2) {
        const bool shape = N == p * M || N == 2 * p * M;
        const bool ok = p % 4 == 3 && shape && m_ok;
        if (ok) v.status = Status::Yes;
        push(criterion::kBadSplitTwistingFactor, ok ? outcome::kPass : outcome::kInapplicable,
             "M = " + std::to_string(M) + ", p = " + std::to_string(p % 4) + " mod 4");
        return v;
    }
    const bool ok = N == 2 * M && m_ok;
    if (ok) v.status = Status::Yes;
    push(criterion::kBadSplitTwistingFactorAtTwo, ok ? outcome::kPass : outcome::kInapplicable, "M = " + std::to_string(M));
    return v;
}

PrimeVerdict verdict_at(const TwistSpec& spec, std::int64_t p) {
    switch (route_for(spec, p)) {
    case Route::Bad: return verdict_bad(spec, p);
    case Route::GoodRamified: return verdict_good_ramified(spec, p);
    case Route::GoodUnramified: return verdict_good_unramified(spec, p);
    }
    throw DispatchError("unreachable");
}

std::vector<std::int64_t> test_primes(const TwistSpec& spec) {
    std::set<std::int64_t> primes(spec.level_primes().begin(), spec.level_primes().end());
    for (auto q : spec.ramified_primes()) primes.insert(q);
    const std::int64_t bound = spec.weil_threshold();
    if (bound > std::numeric_limits<std::uint32_t>::max()) throw BoundError("4g^2 exceeds the prime sieve range");
    for (auto q : ntkernel::primes_up_to(static_cast<std::uint32_t>(bound))) primes.insert(q);
    return {primes.begin(), primes.end()};
}

AggregateVerdict everywhere_local(const TwistSpec& spec) {
    AggregateVerdict agg;
    agg.checked_primes = test_primes(spec);
    bool any_no = false, all_yes = true;
    for (auto p : agg.checked_primes) {
        PrimeVerdict v = verdict_at(spec, p);
        if (v.status == Status::No) any_no = true;
        if (v.status != Status::Yes) all_yes = false;
        if (v.status == Status::Unknown) agg.unknown_primes.push_back(p);
        agg.verdicts.push_back(std::move(v));
    }
    agg.status = any_no ? Status::No : (all_yes ? Status::Yes : Status::Unknown);
    agg.tail = {std::string(criterion::kWeilBoundTail), std::string(outcome::kPass),
                "every other prime is good, unramified and above 4g^2 = " + std::to_string(spec.weil_threshold())};
    return agg;
}

}  // namespace twistlocal::localpoints
