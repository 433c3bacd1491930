#include "twistlocal/picard.hpp"

#include "twistlocal/errors.hpp"
#include "twistlocal/ntkernel.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace twistlocal::picard {

namespace {

using i128 = __int128;

// Finite abelian group prod Z/f_j, elements encoded in mixed radix.
struct LocalGroup {
    std::vector<std::uint64_t> factors;
    std::uint64_t order = 1;

    explicit LocalGroup(std::vector<std::uint64_t> f) : factors(std::move(f)) {
        for (auto x : factors) order *= x;
    }

    std::uint64_t encode(const Element& e) const {
        std::uint64_t code = 0;
        for (std::size_t j = 0; j < factors.size(); ++j) code = code * factors[j] + e[j];
        return code;
    }

    Element decode(std::uint64_t code) const {
        Element e(factors.size());
        for (std::size_t j = factors.size(); j-- > 0;) {
            e[j] = code % factors[j];
            code /= factors[j];
        }
        return e;
    }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        auto x = decode(a), y = decode(b);
        for (std::size_t j = 0; j < factors.size(); ++j) x[j] = (x[j] + y[j]) % factors[j];
        return encode(x);
    }

    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        auto x = decode(a), y = decode(b);
        for (std::size_t j = 0; j < factors.size(); ++j) x[j] = (x[j] + factors[j] - y[j]) % factors[j];
        return encode(x);
    }
};

struct Local {
    LocalGroup group;
    std::unordered_set<std::uint64_t> curve;
    std::vector<std::uint64_t> gens;
    std::uint64_t base;
    const LocalSieveData* src;
};

std::vector<Local> prepare(const SieveData& data) {
    std::vector<Local> out;
    for (const auto& d : data.primes) {
        Local l{LocalGroup(d.factors), {}, {}, 0, &d};
        for (const auto& c : d.curve_image) l.curve.insert(l.group.encode(c));
        for (const auto& g : d.mw_images) l.gens.push_back(l.group.encode(g));
        l.base = l.group.encode(d.basepoint);
        out.push_back(std::move(l));
    }
    return out;
}

struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto x : v) h = (h ^ std::hash<std::uint64_t>{}(x)) * 0x100000001b3ULL;
        return h;
    }
};

struct TooLarge {};

SieveResult enumerate(const std::vector<Local>& locals, std::size_t r) {
    using Point = std::vector<std::uint64_t>;  // one code per prime
    std::unordered_set<Point, VecHash> seen;
    std::vector<Point> queue;
    Point zero(locals.size(), 0);
    seen.insert(zero);
    queue.push_back(zero);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (std::size_t g = 0; g < r; ++g) {
            Point next(locals.size());
            for (std::size_t i = 0; i < locals.size(); ++i) next[i] = locals[i].group.add(queue[head][i], locals[i].gens[g]);
            if (seen.insert(next).second) {
                if (seen.size() > kMaxSubgroup) throw TooLarge{};
                queue.push_back(std::move(next));
            }
        }
    }
    SieveResult res;
    res.method = SieveMethod::Enumerate;
    res.subgroup_size = queue.size();
    res.outcome = SieveOutcome::Obstructed;
    for (const auto& h : queue) {
        bool hit = true;
        for (std::size_t i = 0; i < locals.size() && hit; ++i) {
            hit = locals[i].curve.count(locals[i].group.add(h[i], locals[i].base)) > 0;
        }
        if (hit) {
            res.outcome = SieveOutcome::NotObstructed;
            break;
        }
    }
    return res;
}

// Exact sieve over coset representatives. Survivors after processing primes 1..j are
// representatives x in Z^r / L_j, L_j the kernel of the reduction to those primes,
// whose images land in the translated curve image at every processed prime. L_j is
// kept as a generating set reduced mod D, where D Z^r lies in every L_j.
class Pruner {
public:
    Pruner(const std::vector<Local>& locals, std::size_t r) : locals_(locals), r_(r) {
        D_ = 1;
        for (const auto& l : locals) {
            for (auto f : l.group.factors) {
                const std::uint64_t g = std::gcd(D_, f);
                if (static_cast<i128>(D_ / g) * f > (static_cast<i128>(1) << 62)) {
                    throw BoundError("exponent of the product group exceeds 2^62");
                }
                D_ = D_ / g * f;
            }
        }
        for (std::size_t i = 0; i < r; ++i) {
            std::vector<std::uint64_t> e(r, 0);
            e[i] = 1 % D_;
            lattice_.push_back(e);
        }
    }

    SieveResult run() {
        SieveResult res;
        res.method = SieveMethod::Prune;
        std::vector<std::vector<std::uint64_t>> survivors{std::vector<std::uint64_t>(r_, 0)};
        for (const auto& local : locals_) {
            survivors = extend(local, survivors);
            res.survivors.push_back(survivors.size());
            if (survivors.empty()) {
                res.outcome = SieveOutcome::Obstructed;
                return res;
            }
            intersect_kernel(local);
        }
        res.outcome = SieveOutcome::NotObstructed;
        return res;
    }

private:
    std::uint64_t image(const Local& l, const std::vector<std::uint64_t>& x) const {
        const auto& f = l.group.factors;
        Element e(f.size(), 0);
        for (std::size_t g = 0; g < r_; ++g) {
            const auto& img = l.src->mw_images[g];
            for (std::size_t j = 0; j < f.size(); ++j) {
                e[j] = static_cast<std::uint64_t>((static_cast<i128>(x[g] % f[j]) * img[j] + e[j]) % f[j]);
            }
        }
        return l.group.encode(e);
    }

    std::vector<std::uint64_t> add_vec(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) const {
        std::vector<std::uint64_t> c(r_);
        for (std::size_t i = 0; i < r_; ++i) c[i] = static_cast<std::uint64_t>((static_cast<i128>(a[i]) + b[i]) % D_);
        return c;
    }

    std::vector<std::vector<std::uint64_t>> extend(const Local& l, const std::vector<std::vector<std::uint64_t>>& survivors) {
        // K = image of L_j in G_p, with a preimage in L_j for every element.
        std::unordered_map<std::uint64_t, std::size_t> index;
        std::vector<std::uint64_t> elems{0};
        std::vector<std::vector<std::uint64_t>> pre{std::vector<std::uint64_t>(r_, 0)};
        index[0] = 0;
        std::vector<std::uint64_t> gen_images;
        for (const auto& v : lattice_) gen_images.push_back(image(l, v));
        for (std::size_t head = 0; head < elems.size(); ++head) {
            for (std::size_t g = 0; g < lattice_.size(); ++g) {
                const std::uint64_t next = l.group.add(elems[head], gen_images[g]);
                if (index.emplace(next, elems.size()).second) {
                    if (elems.size() >= kMaxSubgroup) throw BoundError("local image exceeds 1e7 elements");
                    elems.push_back(next);
                    pre.push_back(add_vec(pre[head], lattice_[g]));
                }
            }
        }
        std::vector<std::vector<std::uint64_t>> out;
        for (const auto& x : survivors) {
            const std::uint64_t y = l.group.add(image(l, x), l.base);
            auto accept = [&](std::size_t k) {
                if (out.size() >= kMaxSubgroup) throw BoundError("sieve survivors exceed 1e7");
                out.push_back(add_vec(x, pre[k]));
            };
            if (elems.size() <= l.curve.size()) {
                for (std::size_t k = 0; k < elems.size(); ++k) {
                    if (l.curve.count(l.group.add(y, elems[k]))) accept(k);
                }
            } else {
                std::vector<std::size_t> hits;
                for (auto c : l.curve) {
                    auto it = index.find(l.group.sub(c, y));
                    if (it != index.end()) hits.push_back(it->second);
                }
                std::sort(hits.begin(), hits.end());
                for (auto k : hits) accept(k);
            }
        }
        return out;
    }

    // L <- L intersected with {x : sum x_g a_g = 0 mod n}, one cyclic factor at a time.
    void intersect_kernel(const Local& l) {
        const auto& f = l.group.factors;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const std::uint64_t n = f[j];
            auto c_of = [&](const std::vector<std::uint64_t>& v) {
                i128 s = 0;
                for (std::size_t g = 0; g < r_; ++g) s = (s + static_cast<i128>(v[g] % n) * l.src->mw_images[g][j]) % n;
                return static_cast<std::int64_t>(s);
            };
            std::size_t pivot = lattice_.size();
            for (std::size_t i = 0; i < lattice_.size(); ++i) {
                if (c_of(lattice_[i]) != 0) {
                    pivot = i;
                    break;
                }
            }
            if (pivot == lattice_.size()) continue;
            for (std::size_t i = 0; i < lattice_.size(); ++i) {
                if (i == pivot) continue;
                const std::int64_t ci = c_of(lattice_[i]);
                if (ci == 0) continue;
                const std::int64_t c0 = c_of(lattice_[pivot]);
                auto [g, s, t] = ext_gcd(c0, ci);
                auto v0 = combine(lattice_[pivot], s, lattice_[i], t);
                auto vi = combine(lattice_[pivot], ci / g, lattice_[i], -(c0 / g));
                lattice_[pivot] = std::move(v0);
                lattice_[i] = std::move(vi);
            }
            const std::int64_t c0 = c_of(lattice_[pivot]);
            const std::uint64_t mult = n / std::gcd<std::uint64_t>(static_cast<std::uint64_t>(c0), n);
            lattice_[pivot] = combine(lattice_[pivot], static_cast<std::int64_t>(mult), lattice_[pivot], 0);
        }
        // The implicit generators D e_i keep the lattice full rank; drop zero vectors.
        std::erase_if(lattice_, [](const auto& v) { return std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; }); });
    }

    static std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b) {
        std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            const std::int64_t q = old_r / r;
            std::tie(old_r, r) = std::make_tuple(r, old_r - q * r);
            std::tie(old_s, s) = std::make_tuple(s, old_s - q * s);
            std::tie(old_t, t) = std::make_tuple(t, old_t - q * t);
        }
        return {old_r, old_s, old_t};
    }

    std::vector<std::uint64_t> combine(const std::vector<std::uint64_t>& a, std::int64_t s,
                                       const std::vector<std::uint64_t>& b, std::int64_t t) const {
        std::vector<std::uint64_t> out(r_);
        const i128 D = D_;
        for (std::size_t i = 0; i < r_; ++i) {
            i128 v = (static_cast<i128>(a[i]) * s + static_cast<i128>(b[i]) * t) % D;
            if (v < 0) v += D;
            out[i] = static_cast<std::uint64_t>(v);
        }
        return out;
    }

    const std::vector<Local>& locals_;
    std::size_t r_;
    std::uint64_t D_;
    std::vector<std::vector<std::uint64_t>> lattice_;
};

}  // namespace

void SieveData::validate() const {
    if (primes.empty()) throw DomainError("sieve data has no primes");
    std::set<std::uint64_t> seen;
    const std::size_t r = primes.front().mw_images.size();
    for (const auto& d : primes) {
        const std::string where = "prime " + std::to_string(d.p);
        if (!ntkernel::is_prime(d.p)) throw DomainError(where + ": not prime");
        if (!seen.insert(d.p).second) throw DomainError(where + ": listed twice");
        if (d.factors.empty()) throw DomainError(where + ": no cyclic factors");
        i128 order = 1;
        for (auto f : d.factors) {
            if (f == 0) throw DomainError(where + ": cyclic factor of order 0");
            order *= f;
            if (order > (static_cast<i128>(1) << 62)) throw BoundError(where + ": group order exceeds 2^62");
        }
        auto check = [&](const Element& e, const char* what) {
            if (e.size() != d.factors.size()) throw DomainError(where + ": " + what + " has wrong length");
            for (std::size_t j = 0; j < e.size(); ++j) {
                if (e[j] >= d.factors[j]) throw DomainError(where + ": " + what + " not reduced");
            }
        };
        if (d.curve_image.empty()) throw DomainError(where + ": empty curve image");
        for (const auto& c : d.curve_image) check(c, "curve image element");
        if (d.mw_images.size() != r) throw DomainError(where + ": generator count differs between primes");
        for (const auto& g : d.mw_images) check(g, "generator image");
        check(d.basepoint, "basepoint");
    }
}

SieveData sieve_data_from_json(const nlohmann::json& j) {
    SieveData out;
    try {
        for (const auto& pj : j.at("primes")) {
            const auto p = pj.get<std::uint64_t>();
            const auto& e = j.at(std::to_string(p));
            LocalSieveData d;
            d.p = p;
            d.factors = e.at("factors").get<std::vector<std::uint64_t>>();
            d.curve_image = e.at("curve_image").get<std::vector<Element>>();
            d.mw_images = e.at("mw_images").get<std::vector<Element>>();
            d.basepoint = e.at("basepoint").get<Element>();
            out.primes.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed sieve data: ") + e.what());
    }
    out.validate();
    return out;
}

nlohmann::json to_json(const SieveData& data) {
    nlohmann::json j;
    j["primes"] = nlohmann::json::array();
    for (const auto& d : data.primes) {
        j["primes"].push_back(d.p);
        j[std::to_string(d.p)] = {{"factors", d.factors},
                                  {"curve_image", d.curve_image},
                                  {"mw_images", d.mw_images},
                                  {"basepoint", d.basepoint}};
    }
    return j;
}

std::string_view to_string(SieveOutcome v) {
    return v == SieveOutcome::Obstructed ? "Obstructed" : "NotObstructed";
}

SieveResult mw_sieve_check(const SieveData& data, SieveMethod method) {
    data.validate();
    const auto locals = prepare(data);
    const std::size_t r = data.generator_count();
    if (method == SieveMethod::Auto) {
        // The subgroup has at most prod ord(g_i) elements, and at most |G|.
        long double bound = 1, whole = 1;
        for (std::size_t g = 0; g < r; ++g) {
            std::uint64_t ord = 1;
            for (const auto& d : data.primes) {
                for (std::size_t j = 0; j < d.factors.size(); ++j) {
                    const std::uint64_t f = d.factors[j];
                    const std::uint64_t o = f / std::gcd(f, d.mw_images[g][j]);
                    ord = std::lcm(ord, o);
                    if (ord > kMaxSubgroup) break;
                }
                if (ord > kMaxSubgroup) break;
            }
            bound *= static_cast<long double>(ord);
        }
        for (const auto& d : data.primes) {
            for (auto f : d.factors) whole *= static_cast<long double>(f);
        }
        if (std::min(bound, whole) > static_cast<long double>(kMaxSubgroup)) method = SieveMethod::Prune;
    }
    if (method != SieveMethod::Prune) {
        try {
            return enumerate(locals, r);
        } catch (const TooLarge&) {
            if (method == SieveMethod::Enumerate) throw BoundError("generated subgroup exceeds 1e7 elements");
        }
    }
    return Pruner(locals, r).run();
}

}  // namespace twistlocal::picard
