#include "twistlocal/picard.hpp"

#include "twistlocal/errors.hpp"
#include "twistlocal/ntkernel.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace twistlocal::picard {

std::uint64_t cusp_order_prime(std::uint64_t N) {
    if (N <= 3 || !ntkernel::is_prime(N)) {
        throw DomainError("cusp order needs a prime N > 3, got " + std::to_string(N));
    }
    return (N - 1) / std::gcd<std::uint64_t>(N - 1, 12);
}

std::uint64_t cusp_order_composite(std::uint64_t p, const std::vector<std::uint64_t>& qs) {
    if (p <= 3 || !ntkernel::is_prime(p)) throw DomainError("p must be a prime > 3");
    if (qs.empty()) throw DomainError("need at least one further prime q");
    std::set<std::uint64_t> seen{p};
    for (auto q : qs) {
        if (!ntkernel::is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
        if (!seen.insert(q).second) throw DomainError("primes must be distinct");
    }
    const bool some_not_1_mod_4 = std::any_of(qs.begin(), qs.end(), [](auto q) { return q % 4 != 1; });
    const bool some_not_1_mod_3 = std::any_of(qs.begin(), qs.end(), [](auto q) { return q % 3 != 1; });
    if (!some_not_1_mod_4 || !some_not_1_mod_3) {
        throw DomainError("outside stated case: need some q != 1 mod 4 and some q != 1 mod 3");
    }
    unsigned __int128 Q = 1;
    for (auto q : qs) {
        Q *= q + 1;
        if (Q > (static_cast<unsigned __int128>(1) << 100)) throw DomainError("product of (q + 1) too large");
    }
    const unsigned __int128 num = Q * (p - 1);
    if (num % 12 != 0) throw DomainError("outside stated case: Q (p - 1) is not divisible by 12");
    const unsigned __int128 v = num / 12;
    if (v > UINT64_MAX) throw DomainError("cusp order overflows 64 bits");
    return static_cast<std::uint64_t>(v);
}

std::string_view to_string(Pic1 v) {
    switch (v) {
        case Pic1::Empty: return "Empty";
        case Pic1::NonemptyClass: return "NonemptyClass";
        case Pic1::Unknown: return "Unknown";
    }
    return "?";
}

Pic1Verdict pic1_verdict_prime(std::uint64_t N, bool inert_at_N) {
    const std::uint64_t order = cusp_order_prime(N);
    if (inert_at_N) {
        const auto r = N % 24;
        if (r == 1 || r == 17) return {Pic1::Empty, "N = " + std::to_string(r) + " mod 24, N inert"};
        return {Pic1::NonemptyClass, "N = " + std::to_string(r) + " mod 24, N inert"};
    }
    if (order % 2 == 1) {
        return {Pic1::NonemptyClass,
                "cusp order " + std::to_string(order) + " is odd; assumes local points everywhere"};
    }
    return {Pic1::Unknown, "cusp order " + std::to_string(order) + " is even and N is not inert"};
}

Pic1Verdict pic1_verdict_composite(std::uint64_t p, const std::vector<std::uint64_t>& qs, bool inert_at_p) {
    if (p <= 3 || !ntkernel::is_prime(p)) throw DomainError("p must be a prime > 3");
    if (qs.empty()) throw DomainError("need at least one further prime q");
    if (!inert_at_p) return {Pic1::Unknown, "p is not inert"};
    const bool q3mod4 = std::any_of(qs.begin(), qs.end(), [](auto q) { return q % 4 == 3; });
    const bool q2mod3 = std::any_of(qs.begin(), qs.end(), [](auto q) { return q % 3 == 2; });
    if (q3mod4 && q2mod3) return {Pic1::Empty, "some q = 3 mod 4 and some q = 2 mod 3, p inert"};
    return {Pic1::Unknown, "congruence hypotheses on q fail"};
}

void CuspidalModel::validate() const {
    if (n == 0) throw DomainError("group order must be positive");
    if (n > kMaxCuspidalOrder) throw BoundError("group order exceeds 1e6");
    for (const auto& r : relations) {
        if (r.multiplier >= n || r.target >= n) throw DomainError("relation " + r.label + " not reduced mod n");
        const unsigned __int128 sq = static_cast<unsigned __int128>(r.multiplier) * r.multiplier;
        if (sq % n != 1 % n) throw DomainError("multiplier for " + r.label + " is not an involution mod n");
    }
}

std::vector<std::uint64_t> solve_cuspidal_relations(const CuspidalModel& model) {
    model.validate();
    const std::uint64_t n = model.n;
    std::vector<std::uint64_t> out;
    for (std::uint64_t P = 0; P < n; ++P) {
        bool ok = true;
        for (const auto& r : model.relations) {
            const std::uint64_t coeff = (1 + n - r.multiplier) % n;
            if ((static_cast<unsigned __int128>(coeff) * P) % n != r.target) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(P);
    }
    return out;
}

}  // namespace twistlocal::picard
