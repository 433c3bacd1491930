#include "twistlocal/twistsearch.hpp"

#include "twistlocal/classpoly.hpp"
#include "twistlocal/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace twistlocal::twistsearch {

using ntkernel::SplitType;

namespace {

// A single d admissible for index i, with the data the tuple-level steps need.
struct Candidate {
    std::int64_t d;
    std::vector<std::int64_t> ramified;  // primes dividing disc Q(sqrt d)
    std::string small_signature;         // per small prime: 'S' or 'I'
};

std::vector<std::int64_t> disc_primes(std::int64_t d) {
    const std::int64_t disc = ntkernel::field_discriminant(d);
    const std::uint64_t mag = disc < 0 ? static_cast<std::uint64_t>(-disc) : static_cast<std::uint64_t>(disc);
    return ntkernel::factor(mag).primes();
}

struct Searcher {
    const SearchConfig& config;
    const std::function<bool(const SearchHit&)>& sink;
    SearchDiagnostics diag;
    std::int64_t N = 1;
    std::int64_t threshold = 0;
    std::vector<std::int64_t> level_primes;
    std::vector<std::int64_t> small_primes;  // p < 4g^2, p not dividing N
    std::vector<std::vector<Candidate>> candidates;
    std::vector<std::map<std::string, std::vector<std::size_t>>> buckets;
    std::vector<const Candidate*> chosen;
    bool stopped = false;

    Searcher(const SearchConfig& c, const std::function<bool(const SearchHit&)>& s) : config(c), sink(s) {}

    // Per-index parts of the filters: bad primes split, no small prime ramifies,
    // and large ramified primes satisfy the class polynomial root condition.
    std::optional<Candidate> admit(std::size_t i, std::int64_t d) {
        if (d == 0 || d == 1 || !ntkernel::is_squarefree(d)) return std::nullopt;
        for (auto p : level_primes) {
            if (ntkernel::splitting(p, d) != SplitType::Split) return std::nullopt;
        }
        Candidate c{d, disc_primes(d), {}};
        c.small_signature.reserve(small_primes.size());
        for (auto p : small_primes) {
            const SplitType t = ntkernel::splitting(p, d);
            if (t == SplitType::Ramified) return std::nullopt;
            c.small_signature.push_back(t == SplitType::Split ? 'S' : 'I');
        }
        for (auto q : c.ramified) {
            if (q < threshold) return std::nullopt;
            if (!classpoly::has_root_mod_p(-4 * config.m[i], static_cast<std::uint64_t>(q))) return std::nullopt;
        }
        return c;
    }

    bool tuple_filters() {
        // No prime ramifies in two of the quadratic fields.
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                for (auto q : chosen[i]->ramified) {
                    if (std::binary_search(chosen[j]->ramified.begin(), chosen[j]->ramified.end(), q)) {
                        ++diag.rejected_disjoint_ramification;
                        return false;
                    }
                }
            }
        }
        // A large prime ramified in one field must split in all the others.
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            for (auto q : chosen[i]->ramified) {
                for (std::size_t j = 0; j < chosen.size(); ++j) {
                    if (j != i && ntkernel::splitting(q, chosen[j]->d) != SplitType::Split) {
                        ++diag.rejected_ramified_large;
                        return false;
                    }
                }
            }
        }
        return true;
    }

    void emit() {
        ++diag.tuples_examined;
        if (!tuple_filters()) return;
        std::vector<std::int64_t> d;
        for (const auto* c : chosen) d.push_back(c->d);
        std::optional<localpoints::TwistSpec> spec;
        try {
            spec.emplace(config.m, d);
        } catch (const DomainError&) {
            ++diag.rejected_invalid_spec;
            return;
        }
        SearchHit hit;
        hit.d = d;
        if (config.reverify) {
            hit.verdict = localpoints::everywhere_local(*spec);
            if (hit.verdict.status != localpoints::Status::Yes) {
                ++diag.suppressed;
                return;
            }
        } else {
            hit.verdict.status = localpoints::Status::Yes;
        }
        hit.trace_digest = trace_digest(hit.verdict);
        ++diag.emitted;
        if (!sink(hit) || diag.emitted >= config.limit) stopped = true;
    }

    void recurse(std::size_t i, const std::string& signature) {
        if (stopped) return;
        if (i == config.m.size()) {
            emit();
            return;
        }
        if (i == 0) {
            for (const auto& c : candidates[0]) {
                chosen.push_back(&c);
                recurse(1, c.small_signature);
                chosen.pop_back();
                if (stopped) return;
            }
            return;
        }
        // Every small prime must be inert in all fields or split in all.
        auto it = buckets[i].find(signature);
        const std::size_t matching = it == buckets[i].end() ? 0 : it->second.size();
        diag.rejected_small_primes += candidates[i].size() - matching;
        if (matching == 0) return;
        for (auto idx : it->second) {
            chosen.push_back(&candidates[i][idx]);
            recurse(i + 1, signature);
            chosen.pop_back();
            if (stopped) return;
        }
    }

    void run() {
        for (auto m : config.m) N *= m;
        const int g = ntkernel::genus_x0(static_cast<std::uint64_t>(N));
        threshold = 4LL * g * g;
        level_primes = ntkernel::factor(static_cast<std::uint64_t>(N)).primes();
        for (auto p : ntkernel::primes_up_to(static_cast<std::uint32_t>(std::max<std::int64_t>(threshold - 1, 0)))) {
            if (N % p != 0) small_primes.push_back(p);
        }
        candidates.resize(config.m.size());
        buckets.resize(config.m.size());
        for (std::size_t i = 0; i < config.m.size(); ++i) {
            for (std::int64_t d = -config.bound; d <= config.bound; ++d) {
                if (auto c = admit(i, d)) {
                    buckets[i][c->small_signature].push_back(candidates[i].size());
                    candidates[i].push_back(std::move(*c));
                }
            }
            diag.candidates += candidates[i].size();
        }
        recurse(0, {});
    }
};

}  // namespace

void SearchConfig::validate() const {
    if (m.empty()) throw DomainError("search needs at least one level factor");
    if (bound < 2) throw DomainError("search bound must be at least 2");
    if (limit < 1) throw DomainError("search limit must be at least 1");
    std::int64_t N = 1;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] < 2 || !ntkernel::is_squarefree(m[i])) throw DomainError("level factor " + std::to_string(m[i]) + " must be squarefree and at least 2");
        for (std::size_t j = 0; j < i; ++j) {
            if (ntkernel::gcd(m[i], m[j]) != 1) throw DomainError("level factors must be pairwise coprime");
        }
        if (__builtin_mul_overflow(N, m[i], &N)) throw DomainError("N overflows 64 bits");
    }
}

SearchDiagnostics enumerate_twists(const SearchConfig& config, const std::function<bool(const SearchHit&)>& sink) {
    config.validate();
    Searcher s(config, sink);
    s.run();
    return s.diag;
}

std::vector<SearchHit> enumerate_twists(const SearchConfig& config, SearchDiagnostics* diagnostics) {
    std::vector<SearchHit> hits;
    auto diag = enumerate_twists(config, [&](const SearchHit& h) {
        hits.push_back(h);
        return true;
    });
    if (diagnostics) *diagnostics = diag;
    return hits;
}

std::string trace_digest(const localpoints::AggregateVerdict& verdict) {
    const std::string text = localpoints::to_json(verdict).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json to_json(const SearchHit& hit) {
    return nlohmann::json{{"d", hit.d}, {"verdict", std::string(localpoints::to_string(hit.verdict.status))}, {"trace_digest", hit.trace_digest}};
}

}  // namespace twistlocal::twistsearch
