#include "twistlocal/ntkernel.hpp"

#include "twistlocal/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace twistlocal::ntkernel {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 magnitude(std::int64_t x) {
    return x < 0 ? u64(0) - static_cast<u64>(x) : static_cast<u64>(x);
}

// Jacobi symbol (a/n) for odd n > 0.
int jacobi(u64 a, u64 n) {
    a %= n;
    int t = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            const u64 r = n & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

u64 pollard_brent(u64 n) {
    if ((n & 1) == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace

std::string_view to_string(SplitType s) {
    switch (s) {
    case SplitType::Split: return "split";
    case SplitType::Inert: return "inert";
    case SplitType::Ramified: return "ramified";
    }
    return "?";
}

std::vector<std::int64_t> Factorization::primes() const {
    std::vector<std::int64_t> out;
    out.reserve(factors.size());
    for (const auto& f : factors) out.push_back(f.prime);
    return out;
}

bool Factorization::squarefree() const {
    return std::all_of(factors.begin(), factors.end(), [](const PrimePower& f) { return f.exponent == 1; });
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(std::gcd(magnitude(a), magnitude(b)));
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These twelve bases are a proven witness set below 3.3e24.
    for (u64 a : small) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

int kronecker_symbol(std::int64_t a, std::int64_t n) {
    if (n == 0) throw DomainError("kronecker_symbol: n must be nonzero");
    int result = 1;
    if (n < 0 && a < 0) result = -1;
    u64 m = magnitude(n);
    int twos = 0;
    while ((m & 1) == 0) {
        m >>= 1;
        ++twos;
    }
    if (twos > 0) {
        if ((a & 1) == 0) return 0;
        if (twos & 1) {
            const std::int64_t r = ((a % 8) + 8) % 8;
            if (r == 3 || r == 5) result = -result;
        }
    }
    if (m == 1) return result;
    // (a/m) for odd m > 0, with a reduced to [0, m).
    u64 ar = magnitude(a) % m;
    if (a < 0 && ar != 0) ar = m - ar;
    return result * jacobi(ar, m);
}

Factorization factor(u64 n, u64 bound) {
    if (n == 0) throw DomainError("factor: n must be positive");
    if (n > bound) throw BoundError("factor: " + std::to_string(n) + " is too large (bound " + std::to_string(bound) + ")");
    Factorization result;
    result.n = n;
    std::vector<u64> primes;
    u64 rest = n;
    for (u64 p = 2; p < 1000 && p * p <= rest; p += (p == 2 ? 1 : 2)) {
        while (rest % p == 0) {
            primes.push_back(p);
            rest /= p;
        }
    }
    factor_into(rest, primes);
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!result.factors.empty() && result.factors.back().prime == static_cast<std::int64_t>(p)) {
            ++result.factors.back().exponent;
        } else {
            result.factors.push_back({static_cast<std::int64_t>(p), 1});
        }
    }
    return result;
}

bool is_squarefree(std::int64_t n) {
    if (n == 0) return false;
    return factor(magnitude(n)).squarefree();
}

std::int64_t field_discriminant(std::int64_t d) {
    const std::int64_t r = ((d % 4) + 4) % 4;
    return r == 1 ? d : 4 * d;
}

SplitType splitting(std::int64_t p, std::int64_t d) {
    if (p < 2 || !is_prime(static_cast<u64>(p))) throw DomainError("splitting: p = " + std::to_string(p) + " is not prime");
    if (d == 0 || d == 1) throw DomainError("splitting: d must not be 0 or 1");
    if (!is_squarefree(d)) throw DomainError("splitting: d = " + std::to_string(d) + " is not squarefree");
    if (p == 2) {
        const std::int64_t r = ((d % 8) + 8) % 8;
        if (r == 1) return SplitType::Split;
        if (r == 5) return SplitType::Inert;
        return SplitType::Ramified;
    }
    const int k = kronecker_symbol(d, p);
    if (k == 0) return SplitType::Ramified;
    return k == 1 ? SplitType::Split : SplitType::Inert;
}

int genus_x0(u64 N) {
    if (N == 0) throw DomainError("genus_x0: N must be positive");
    const Factorization f = factor(N);
    if (!f.squarefree()) throw DomainError("genus_x0: N = " + std::to_string(N) + " is not squarefree");
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 nu_inf
    __int128 mu = 1, nu2 = 1, nu3 = 1, cusps = 1;
    for (const auto& pf : f.factors) {
        const std::int64_t p = pf.prime;
        mu *= p + 1;
        nu2 *= (p == 2) ? 1 : 1 + kronecker_symbol(-1, p);
        nu3 *= (p == 3) ? 1 : 1 + kronecker_symbol(-3, p);
        cusps *= 2;
    }
    const __int128 twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    if (twelve_g < 0 || twelve_g % 12 != 0) throw DomainError("genus_x0: formula did not cancel");
    return static_cast<int>(twelve_g / 12);
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

}  // namespace twistlocal::ntkernel
