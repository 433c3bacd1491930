#include "twistlocal/classpoly.hpp"

#include "mpfr_complex.hpp"
#include "twistlocal/errors.hpp"
#include "twistlocal/ntkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace twistlocal::classpoly {

namespace {

using detail::Complex;
using detail::Real;

std::int64_t isqrt(std::int64_t n) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// prod_{n>=1} (1 - q^n) by the pentagonal number series.
void euler_product(Complex& out, const Complex& q, double log2_abs_q, mpfr_prec_t prec) {
    Real tmp(prec);
    Complex qk(prec), qk1(prec), cur(prec), scratch(prec);
    mpfr_set_ui(out.re.get(), 1, MPFR_RNDN);
    mpfr_set_zero(out.im.get(), 1);
    // cur = q^{k(3k-1)/2}, qk = q^k, qk1 = q^{k+1}
    cur = q;
    qk = q;
    mul(qk1, q, q, tmp);
    const double target = -static_cast<double>(prec) - 16.0;
    for (long k = 1;; ++k) {
        const double e1 = static_cast<double>(k) * (3.0 * k - 1.0) / 2.0;
        if (e1 * log2_abs_q < target) break;
        const bool negative = (k & 1) != 0;
        auto accumulate = [&](const Complex& term) {
            if (negative) {
                mpfr_sub(out.re.get(), out.re.get(), term.re.get(), MPFR_RNDN);
                mpfr_sub(out.im.get(), out.im.get(), term.im.get(), MPFR_RNDN);
            } else {
                mpfr_add(out.re.get(), out.re.get(), term.re.get(), MPFR_RNDN);
                mpfr_add(out.im.get(), out.im.get(), term.im.get(), MPFR_RNDN);
            }
        };
        accumulate(cur);
        // q^{k(3k+1)/2}
        mul(scratch, cur, qk, tmp);
        accumulate(scratch);
        // advance to q^{(k+1)(3k+2)/2} = q^{k(3k+1)/2} q^k q^{k+1}
        mul(cur, scratch, qk, tmp);
        std::swap(scratch, cur);
        mul(cur, scratch, qk1, tmp);
        std::swap(qk, qk1);
        mul(qk1, qk, q, tmp);
    }
}

// j((-b + sqrt(D)) / 2a) via j = (1 + 256 t)^3 / t, t = (eta(2 tau) / eta(tau))^24.
Complex j_invariant(std::int64_t D, const ReducedForm& f, mpfr_prec_t prec) {
    Real pi(prec), x(prec), mag(prec), angle(prec), t1(prec), t2(prec);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    // |q| = exp(-pi sqrt|D| / a), arg q = -pi b / a
    mpfr_sqrt_ui(x.get(), static_cast<unsigned long>(-D), MPFR_RNDN);
    mpfr_mul(x.get(), x.get(), pi.get(), MPFR_RNDN);
    mpfr_div_si(x.get(), x.get(), f.a, MPFR_RNDN);
    mpfr_neg(x.get(), x.get(), MPFR_RNDN);
    mpfr_exp(mag.get(), x.get(), MPFR_RNDN);
    mpfr_mul_si(angle.get(), pi.get(), -f.b, MPFR_RNDN);
    mpfr_div_si(angle.get(), angle.get(), f.a, MPFR_RNDN);

    Complex q(prec);
    mpfr_sin_cos(q.im.get(), q.re.get(), angle.get(), MPFR_RNDN);
    mpfr_mul(q.re.get(), q.re.get(), mag.get(), MPFR_RNDN);
    mpfr_mul(q.im.get(), q.im.get(), mag.get(), MPFR_RNDN);

    const double log2_abs_q = -std::numbers::pi * std::sqrt(static_cast<double>(-D)) / static_cast<double>(f.a) / std::numbers::ln2;

    Complex q2(prec), e1(prec), e2(prec), ratio(prec), sq(prec), p8(prec), p16(prec), p24(prec), t(prec);
    mul(q2, q, q, t1);
    euler_product(e1, q, log2_abs_q, prec);
    euler_product(e2, q2, 2.0 * log2_abs_q, prec);
    div(ratio, e2, e1, t1, t2);
    mul(sq, ratio, ratio, t1);     // ^2
    mul(p8, sq, sq, t1);           // ^4
    mul(sq, p8, p8, t1);           // ^8
    mul(p16, sq, sq, t1);          // ^16
    mul(p24, p16, sq, t1);         // ^24
    mul(t, p24, q, t1);

    // num = (1 + 256 t)^3
    Complex u(prec), u2(prec), num(prec), j(prec);
    mpfr_mul_ui(u.re.get(), t.re.get(), 256, MPFR_RNDN);
    mpfr_add_ui(u.re.get(), u.re.get(), 1, MPFR_RNDN);
    mpfr_mul_ui(u.im.get(), t.im.get(), 256, MPFR_RNDN);
    mul(u2, u, u, t1);
    mul(num, u2, u, t1);
    div(j, num, t, t1, t2);
    return j;
}

bool is_real_form(const ReducedForm& f) {
    return f.b == 0 || f.a == f.b || f.a == f.c;
}

struct Rounded {
    std::vector<mpz_class> coeffs;  // descending
    bool certified = false;
};

Rounded expand_and_round(std::int64_t D, const std::vector<ReducedForm>& forms, mpfr_prec_t prec) {
    // Ascending coefficients of the real product.
    std::vector<Real> poly;
    poly.emplace_back(prec);
    mpfr_set_ui(poly[0].get(), 1, MPFR_RNDN);
    Real tmp(prec), s(prec), n(prec);

    auto mul_linear = [&](const Real& root) {
        poly.emplace_back(prec);
        for (std::size_t i = poly.size() - 1; i > 0; --i) {
            mpfr_mul(tmp.get(), root.get(), poly[i].get(), MPFR_RNDN);
            mpfr_sub(poly[i].get(), poly[i - 1].get(), tmp.get(), MPFR_RNDN);
        }
        mpfr_mul(poly[0].get(), poly[0].get(), root.get(), MPFR_RNDN);
        mpfr_neg(poly[0].get(), poly[0].get(), MPFR_RNDN);
    };
    // multiply by X^2 - s X + n
    auto mul_quadratic = [&]() {
        poly.emplace_back(prec);
        poly.emplace_back(prec);
        for (std::size_t i = poly.size() - 1; i > 0; --i) {
            // new[i] = old[i-2] - s old[i-1] + n old[i]
            mpfr_mul(poly[i].get(), poly[i].get(), n.get(), MPFR_RNDN);
            mpfr_mul(tmp.get(), poly[i - 1].get(), s.get(), MPFR_RNDN);
            mpfr_sub(poly[i].get(), poly[i].get(), tmp.get(), MPFR_RNDN);
            if (i >= 2) mpfr_add(poly[i].get(), poly[i].get(), poly[i - 2].get(), MPFR_RNDN);
        }
        mpfr_mul(poly[0].get(), poly[0].get(), n.get(), MPFR_RNDN);
    };

    for (const auto& f : forms) {
        if (is_real_form(f)) {
            Complex j = j_invariant(D, f, prec);
            mul_linear(j.re);
        } else if (f.b > 0) {
            // (a, -b, c) contributes the complex conjugate root.
            Complex j = j_invariant(D, f, prec);
            mpfr_mul_2ui(s.get(), j.re.get(), 1, MPFR_RNDN);
            mpfr_sqr(n.get(), j.re.get(), MPFR_RNDN);
            mpfr_sqr(tmp.get(), j.im.get(), MPFR_RNDN);
            mpfr_add(n.get(), n.get(), tmp.get(), MPFR_RNDN);
            mul_quadratic();
        }
    }

    Rounded out;
    out.coeffs.resize(poly.size());
    Real residual(prec), threshold(64);
    mpfr_set_ui_2exp(threshold.get(), 1, -10, MPFR_RNDN);
    out.certified = true;
    mpz_class z;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        mpfr_get_z(z.get_mpz_t(), poly[i].get(), MPFR_RNDN);
        mpfr_sub_z(residual.get(), poly[i].get(), z.get_mpz_t(), MPFR_RNDN);
        mpfr_abs(residual.get(), residual.get(), MPFR_RNDN);
        if (mpfr_cmp(residual.get(), threshold.get()) >= 0 || !mpfr_number_p(poly[i].get())) out.certified = false;
        out.coeffs[poly.size() - 1 - i] = z;
    }
    return out;
}

}  // namespace

void check_discriminant(std::int64_t D) {
    const std::int64_t r = ((D % 4) + 4) % 4;
    if (D >= 0 || (r != 0 && r != 1)) throw DomainError("discriminant " + std::to_string(D) + " must be negative and 0 or 1 mod 4");
}

std::vector<ReducedForm> reduced_forms(std::int64_t D) {
    check_discriminant(D);
    std::vector<ReducedForm> forms;
    const std::int64_t amax = isqrt(-D / 3);
    for (std::int64_t a = 1; a <= amax; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if (((b - D) & 1) != 0) continue;
            const std::int64_t num = b * b - D;
            if (num % (4 * a) != 0) continue;
            const std::int64_t c = num / (4 * a);
            if (c < a) continue;
            if (c == a && b < 0) continue;
            if (ntkernel::gcd(ntkernel::gcd(a, b), c) != 1) continue;
            forms.push_back({a, b, c});
        }
    }
    std::sort(forms.begin(), forms.end());
    return forms;
}

int class_number(std::int64_t D) {
    return static_cast<int>(reduced_forms(D).size());
}

long precision_estimate(std::int64_t D, const std::vector<ReducedForm>& forms) {
    // |c_k| <= prod (1 + |j_i|) and |j(tau)| <= exp(pi sqrt|D| / a) + 2100 on reduced forms.
    const double root = std::sqrt(static_cast<double>(-D));
    double bits = 0.0;
    for (const auto& f : forms) {
        const double x = std::numbers::pi * root / static_cast<double>(f.a);
        bits += (x + std::log1p(2100.0 * std::exp(-x))) / std::numbers::ln2;
    }
    const double h = static_cast<double>(forms.size());
    return static_cast<long>(std::ceil(bits + 2.0 * std::log2(h + 1.0))) + 64;
}

HilbertClassPoly compute_hilbert_class_poly(std::int64_t D, const EvalOptions& options) {
    check_discriminant(D);
    if (-D > options.disc_bound) {
        throw BoundError("class polynomial: |D| = " + std::to_string(-D) + " exceeds bound " + std::to_string(options.disc_bound));
    }
    HilbertClassPoly H;
    H.disc = D;
    H.forms = reduced_forms(D);
    H.degree = static_cast<int>(H.forms.size());
    auto prec = static_cast<mpfr_prec_t>(std::ceil(options.precision_scale * static_cast<double>(precision_estimate(D, H.forms))));
    for (int attempt = 0; attempt <= options.max_doublings; ++attempt, prec *= 2) {
        Rounded r = expand_and_round(D, H.forms, prec);
        if (r.certified) {
            H.coeffs = std::move(r.coeffs);
            H.precision_bits = prec;
            return H;
        }
    }
    throw PrecisionError("class polynomial for D = " + std::to_string(D) + " not certified after " +
                         std::to_string(options.max_doublings) + " precision doublings");
}

std::string HilbertClassPoly::to_string() const {
    std::ostringstream out;
    for (int i = 0; i <= degree; ++i) {
        const int power = degree - i;
        const mpz_class& c = coeffs[i];
        if (c == 0) continue;
        const bool first = out.tellp() == 0;
        const mpz_class mag = abs(c);
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        if (power == 0) {
            out << mag.get_str();
        } else {
            if (mag != 1) out << mag.get_str() << "*";
            out << "X";
            if (power > 1) out << "^" << power;
        }
    }
    if (out.tellp() == 0) out << "0";
    return out.str();
}

std::vector<std::uint64_t> reduce_mod(const HilbertClassPoly& H, std::uint64_t p) {
    std::vector<std::uint64_t> out(H.coeffs.size());
    mpz_class r;
    for (std::size_t i = 0; i < H.coeffs.size(); ++i) {
        mpz_fdiv_r_ui(r.get_mpz_t(), H.coeffs[i].get_mpz_t(), p);
        out[i] = r.get_ui();
    }
    return out;
}

namespace {

using u64 = std::uint64_t;
using PolyMod = std::vector<u64>;  // ascending

void trim(PolyMod& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

// a * b mod (f, p), f monic ascending of degree n.
PolyMod mulmod_poly(const PolyMod& a, const PolyMod& b, const PolyMod& f, u64 p) {
    const std::size_t n = f.size() - 1;
    std::vector<u64> prod(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            prod[i + j] = (prod[i + j] + ntkernel::mulmod(a[i], b[j], p)) % p;
        }
    }
    for (std::size_t k = prod.size(); k-- > n;) {
        const u64 c = prod[k];
        if (c == 0) continue;
        prod[k] = 0;
        for (std::size_t i = 0; i < n; ++i) {
            // X^k = X^{k-n} * (-(f_0 + ... + f_{n-1} X^{n-1}))
            prod[k - n + i] = (prod[k - n + i] + p - ntkernel::mulmod(c, f[i], p)) % p;
        }
    }
    prod.resize(std::min(prod.size(), n));
    trim(prod);
    return prod;
}

PolyMod poly_rem(PolyMod a, const PolyMod& b, u64 p) {
    trim(a);
    const u64 inv = ntkernel::powmod(b.back(), p - 2, p);
    while (a.size() >= b.size()) {
        const u64 c = ntkernel::mulmod(a.back(), inv, p);
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) {
            a[shift + i] = (a[shift + i] + p - ntkernel::mulmod(c, b[i], p)) % p;
        }
        trim(a);
    }
    return a;
}

std::size_t poly_gcd_degree(PolyMod a, PolyMod b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        PolyMod r = poly_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a.empty() ? 0 : a.size() - 1;
}

}  // namespace

bool has_root_mod_p(const HilbertClassPoly& H, std::uint64_t p) {
    if (!ntkernel::is_prime(p)) throw DomainError("has_root_mod_p: " + std::to_string(p) + " is not prime");
    const std::vector<u64> desc = reduce_mod(H, p);
    if (H.degree == 1) return true;
    if (p < 10'000) {
        for (u64 x = 0; x < p; ++x) {
            u64 v = 0;
            for (u64 c : desc) v = (ntkernel::mulmod(v, x, p) + c) % p;
            if (v == 0) return true;
        }
        return false;
    }
    PolyMod f(desc.rbegin(), desc.rend());
    // X^p mod f
    PolyMod result{1}, base{0, 1};
    base = mulmod_poly(base, PolyMod{1}, f, p);
    for (u64 e = p; e; e >>= 1) {
        if (e & 1) result = mulmod_poly(result, base, f, p);
        base = mulmod_poly(base, base, f, p);
    }
    // X^p - X
    if (result.size() < 2) result.resize(2, 0);
    result[1] = (result[1] + p - 1) % p;
    trim(result);
    if (result.empty()) return true;  // f divides X^p - X
    return poly_gcd_degree(f, result, p) > 0;
}

bool is_separable_mod_p(const HilbertClassPoly& H, std::uint64_t p) {
    if (!ntkernel::is_prime(p)) throw DomainError("is_separable_mod_p: " + std::to_string(p) + " is not prime");
    const std::vector<u64> desc = reduce_mod(H, p);
    PolyMod f(desc.rbegin(), desc.rend());
    PolyMod df;
    for (std::size_t i = 1; i < f.size(); ++i) df.push_back(ntkernel::mulmod(i % p, f[i], p));
    trim(df);
    return poly_gcd_degree(f, df, p) == 0;
}

}  // namespace twistlocal::classpoly
