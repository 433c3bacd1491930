#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace twistlocal::ntkernel {

struct PrimePower {
    std::int64_t prime;
    int exponent;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// n = product of prime^exponent over factors; primes strictly increasing.
struct Factorization {
    std::uint64_t n = 1;
    std::vector<PrimePower> factors;

    std::vector<std::int64_t> primes() const;
    bool squarefree() const;
};

enum class SplitType { Split, Inert, Ramified };

std::string_view to_string(SplitType s);

// Largest n accepted by factor(); everything representable fits.
inline constexpr std::uint64_t kDefaultFactorBound = UINT64_MAX;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
std::int64_t gcd(std::int64_t a, std::int64_t b);

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

// Kronecker symbol (a/n). Throws DomainError for n == 0.
int kronecker_symbol(std::int64_t a, std::int64_t n);

// Throws DomainError when n == 0 or n > bound.
Factorization factor(std::uint64_t n, std::uint64_t bound = kDefaultFactorBound);

bool is_squarefree(std::int64_t n);

// Splitting of the prime p in Q(sqrt(d)). d must be squarefree and not 0 or 1.
SplitType splitting(std::int64_t p, std::int64_t d);

// Discriminant of Q(sqrt(d)) for squarefree d.
std::int64_t field_discriminant(std::int64_t d);

// Genus of X_0(N) for squarefree N >= 1.
int genus_x0(std::uint64_t N);

// All primes <= limit, by an Eratosthenes sieve.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

}  // namespace twistlocal::ntkernel
