#include "twistlocal/twistsearch.hpp"

#include "twistlocal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace twistlocal::twistsearch {

namespace {

constexpr std::uint64_t kMaxCountBound = 100'000'000;
constexpr std::uint64_t kSegment = 1 << 18;

int legendre(std::int64_t a, std::int64_t p) { return ntkernel::kronecker_symbol(a, p); }

}  // namespace

bool Preflight::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const PreflightCheck& c) { return c.ok; });
}

std::string Preflight::failures() const {
    std::string out;
    for (const auto& c : checks) {
        if (c.ok) continue;
        if (!out.empty()) out += "; ";
        out += c.name;
        if (!c.detail.empty()) out += " (" + c.detail + ")";
    }
    return out;
}

Preflight density_preflight(std::int64_t m1, std::int64_t m2, std::int64_t d1) {
    Preflight pf;
    auto add = [&](std::string name, bool ok, std::string detail = {}) {
        pf.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    const bool primes_ok = m1 > 2 && m2 > 2 && d1 > 2 && ntkernel::is_prime(m1) && ntkernel::is_prime(m2) &&
                           ntkernel::is_prime(d1) && m1 != m2 && d1 != m1 && d1 != m2;
    add("m1, m2, d1 distinct odd primes", primes_ok);
    if (!primes_ok) return pf;
    add("m1 = 1 mod 4", m1 % 4 == 1, "m1 mod 4 = " + std::to_string(m1 % 4));
    add("m2 = 1 mod 4", m2 % 4 == 1, "m2 mod 4 = " + std::to_string(m2 % 4));
    add("d1 = 1 mod 4", d1 % 4 == 1, "d1 mod 4 = " + std::to_string(d1 % 4));
    add("m1 = m2 mod 8", m1 % 8 == m2 % 8);
    add("(d1/m1) = 1", legendre(d1, m1) == 1);
    add("(d1/m2) = 1", legendre(d1, m2) == 1);
    add("(-2 m1/m2) = 1", legendre(-2 * m1, m2) == 1);

    bool root = false;
    std::string detail;
    try {
        root = classpoly::has_root_mod_p(-4 * m1, static_cast<std::uint64_t>(d1));
    } catch (const std::exception& e) {
        detail = e.what();
    }
    add("H(-4 m1) has a root mod d1", root, detail);

    const int g = ntkernel::genus_x0(static_cast<std::uint64_t>(m1 * m2));
    const std::int64_t w = 4LL * g * g;
    // 2 is decided by d1 mod 8 and reported on its own.
    if (w > 2) {
        add("2 splits in Q(sqrt d1)", d1 % 8 == 1, "d1 mod 8 = " + std::to_string(d1 % 8));
    }
    std::string bad;
    for (auto p : ntkernel::primes_up_to(static_cast<std::uint32_t>(std::max<std::int64_t>(w - 1, 0)))) {
        if (p == 2) continue;
        if (ntkernel::splitting(p, d1) != ntkernel::SplitType::Split) {
            if (!bad.empty()) bad += ",";
            bad += std::to_string(p);
        }
    }
    add("odd p < 4g^2 split in Q(sqrt d1)", bad.empty(), bad.empty() ? "4g^2 = " + std::to_string(w) : "not split: " + bad);
    return pf;
}

std::optional<std::int64_t> smallest_admissible_d1(std::int64_t m1, std::int64_t m2, std::int64_t limit) {
    if (!ntkernel::is_prime(m1) || !ntkernel::is_prime(m2) || m1 == m2) {
        throw DomainError("m1 and m2 must be distinct primes");
    }
    const int g = ntkernel::genus_x0(static_cast<std::uint64_t>(m1 * m2));
    const std::int64_t w = 4LL * g * g;
    std::vector<std::int64_t> odd_small;
    for (auto p : ntkernel::primes_up_to(static_cast<std::uint32_t>(std::max<std::int64_t>(w - 1, 2)))) {
        if (p > 2 && p < w) odd_small.push_back(p);
    }
    // Residues mod L = 8 * (leading odd small primes) compatible with d1 = 1 mod 8
    // and d1 a nonzero square mod each of those primes.
    std::int64_t L = 8;
    std::size_t used = 0;
    while (used < odd_small.size() && L * odd_small[used] <= 2'000'000) L *= odd_small[used++];
    std::vector<std::int64_t> residues;
    for (std::int64_t r = 1; r < L; r += 8) {
        bool ok = true;
        for (std::size_t i = 0; i < used && ok; ++i) ok = legendre(r, odd_small[i]) == 1;
        if (ok) residues.push_back(r);
    }
    for (std::int64_t base = 0; base <= limit; base += L) {
        for (auto r : residues) {
            const std::int64_t n = base + r;
            if (n > limit) return std::nullopt;
            if (n < 3) continue;
            bool ok = true;
            for (std::size_t i = used; i < odd_small.size() && ok; ++i) ok = legendre(n, odd_small[i]) == 1;
            if (!ok || !ntkernel::is_prime(n)) continue;
            if (density_preflight(m1, m2, n).ok()) return n;
        }
    }
    return std::nullopt;
}

ChebotarevSet::ChebotarevSet(std::int64_t m2, std::int64_t d1)
    : m2_(m2), d1_(d1), poly_(classpoly::hilbert_class_poly(-4 * m2)) {}

bool ChebotarevSet::contains(std::uint64_t p) const {
    if (ntkernel::kronecker_symbol(d1_, static_cast<std::int64_t>(p)) != 1) return false;
    return classpoly::has_root_mod_p(*poly_, p);
}

bool ChebotarevSet::contains_regular(std::uint64_t p) const {
    return contains(p) && classpoly::is_separable_mod_p(*poly_, p);
}

ChebotarevSample chebotarev_sample(std::int64_t m2, std::int64_t d1, std::uint64_t B) {
    if (B < 100'000) throw DomainError("sample bound must be at least 1e5");
    if (B > kMaxCountBound) throw BoundError("sample bound exceeds 1e8");
    ChebotarevSet S(m2, d1);
    ChebotarevSample out;
    out.bound = B;
    for (auto p : ntkernel::primes_up_to(static_cast<std::uint32_t>(B))) {
        ++out.primes;
        if (S.contains(p)) ++out.members;
    }
    out.alpha_hat = static_cast<double>(out.members) / static_cast<double>(out.primes);
    return out;
}

APrimeCounter::APrimeCounter(std::int64_t m1, std::int64_t m2, std::int64_t d1, std::uint64_t X) : X_(X) {
    if (X > kMaxCountBound) throw BoundError("X exceeds 1e8");
    ChebotarevSet S(m2, d1);
    const std::int64_t Nd = m1 * m2;
    primes_ = ntkernel::primes_up_to(static_cast<std::uint32_t>(std::max<std::uint64_t>(X, 2)));
    excluded_.resize(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        const std::int64_t p = primes_[i];
        excluded_[i] = Nd % p == 0 || d1 % p == 0 || !S.contains_regular(static_cast<std::uint64_t>(p));
    }
}

namespace {

// Marks, within [lo, hi), integers divisible by an excluded prime or by a square.
template <class F>
void sieve_segments(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint32_t>& primes,
                    const std::vector<bool>& excluded, F&& visit) {
    std::vector<char> bad;
    for (std::uint64_t a = lo; a < hi; a += kSegment) {
        const std::uint64_t b = std::min(hi, a + kSegment);
        bad.assign(b - a, 0);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const std::uint64_t p = primes[i];
            if (p >= b) break;
            if (excluded[i]) {
                for (std::uint64_t n = (a + p - 1) / p * p; n < b; n += p) bad[n - a] = 1;
            }
            const std::uint64_t sq = p * p;
            if (sq < b) {
                for (std::uint64_t n = (a + sq - 1) / sq * sq; n < b; n += sq) bad[n - a] = 1;
            }
        }
        // Odd d2 = 1 mod 4, d2 > 1.
        std::uint64_t n = a + ((1 + 4 - a % 4) % 4);
        for (; n < b; n += 4) {
            if (n > 1 && !bad[n - a]) visit(n);
        }
    }
}

}  // namespace

std::uint64_t APrimeCounter::count_range(std::uint64_t lo, std::uint64_t hi) const {
    if (lo < 1 || lo > hi || hi > X_ + 1) throw DomainError("count range outside [1, X]");
    std::uint64_t c = 0;
    sieve_segments(lo, hi, primes_, excluded_, [&](std::uint64_t) { ++c; });
    return c;
}

std::vector<std::int64_t> APrimeCounter::members(std::uint64_t lo, std::uint64_t hi, std::size_t max_items) const {
    if (lo < 1 || lo > hi || hi > X_ + 1) throw DomainError("member range outside [1, X]");
    std::vector<std::int64_t> out;
    // Grow the window so small requests do not sieve the whole range.
    std::uint64_t a = lo;
    while (a < hi && out.size() < max_items) {
        const std::uint64_t b = std::min(hi, a + kSegment);
        sieve_segments(a, b, primes_, excluded_, [&](std::uint64_t n) {
            if (out.size() < max_items) out.push_back(static_cast<std::int64_t>(n));
        });
        a = b;
    }
    return out;
}

std::uint64_t APrimeCounter::count(std::uint64_t upto, unsigned threads) const {
    if (upto > X_) throw DomainError("count bound exceeds X");
    if (upto == 0) return 0;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t span = upto;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, span / kSegment)));
    if (threads <= 1) return count_range(1, upto + 1);
    std::vector<std::uint64_t> partial(threads, 0);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t lo = 1 + span * t / threads;
        const std::uint64_t hi = 1 + span * (t + 1) / threads;
        pool.emplace_back([&, t, lo, hi] { partial[t] = count_range(lo, hi); });
    }
    for (auto& th : pool) th.join();
    return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

DensityResult count_A_prime(std::int64_t m1, std::int64_t m2, std::int64_t d1, std::uint64_t X, std::uint64_t B,
                            unsigned threads) {
    DensityResult result;
    result.preflight = density_preflight(m1, m2, d1);
    if (!result.preflight.ok()) return result;
    if (X < 10) throw DomainError("X must be at least 10");

    DensityReport r;
    const auto sample = chebotarev_sample(m2, d1, B);
    r.alpha_hat = sample.alpha_hat;
    r.sample_bound = B;
    APrimeCounter counter(m1, m2, d1, X);
    std::vector<std::uint64_t> checkpoints{X / 10, X / 3, X};
    for (auto x : checkpoints) {
        const std::uint64_t c = counter.count(x, threads);
        r.counts.emplace_back(x, c);
        r.c_trajectory.emplace_back(x, static_cast<double>(c) * std::pow(std::log(static_cast<double>(x)), 1.0 - r.alpha_hat) /
                                           static_cast<double>(x));
    }
    r.smallest = counter.members(1, X + 1, 10);
    std::ostringstream h;
    h << "# A'(X): squarefree d2 <= X, d2 = 1 mod 4, d2 > 1, gcd(d2, m1 m2 d1) = 1, primes of d2 in S_N with H(-4 m2) separable mod p; m1=" << m1
      << " m2=" << m2 << " d1=" << d1 << " alpha_hat=" << r.alpha_hat << " (B=" << B << ")";
    r.header = h.str();
    result.report = std::move(r);
    return result;
}

std::string to_csv(const DensityReport& report) {
    std::ostringstream out;
    out << "X,count,c_hat\n";
    out.precision(10);
    for (std::size_t i = 0; i < report.counts.size(); ++i) {
        out << report.counts[i].first << ',' << report.counts[i].second << ',' << report.c_trajectory[i].second << '\n';
    }
    return out.str();
}

}  // namespace twistlocal::twistsearch
