#pragma once

#include <mpfr.h>

#include <utility>

namespace twistlocal::detail {

// Owning mpfr_t with value semantics.
class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

private:
    mpfr_t v_;
};

struct Complex {
    Real re;
    Real im;

    explicit Complex(mpfr_prec_t prec) : re(prec), im(prec) {}
};

// out = x * y; out must not alias x or y.
inline void mul(Complex& out, const Complex& x, const Complex& y, Real& tmp) {
    mpfr_mul(out.re.get(), x.re.get(), y.re.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), x.im.get(), y.im.get(), MPFR_RNDN);
    mpfr_sub(out.re.get(), out.re.get(), tmp.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), x.re.get(), y.im.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), x.im.get(), y.re.get(), MPFR_RNDN);
    mpfr_add(out.im.get(), out.im.get(), tmp.get(), MPFR_RNDN);
}

// out = x / y; out must not alias x or y.
inline void div(Complex& out, const Complex& x, const Complex& y, Real& t1, Real& t2) {
    // (x.re + i x.im)(y.re - i y.im) / |y|^2
    mpfr_sqr(t1.get(), y.re.get(), MPFR_RNDN);
    mpfr_sqr(t2.get(), y.im.get(), MPFR_RNDN);
    mpfr_add(t1.get(), t1.get(), t2.get(), MPFR_RNDN);
    mpfr_mul(out.re.get(), x.re.get(), y.re.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), x.im.get(), y.im.get(), MPFR_RNDN);
    mpfr_add(out.re.get(), out.re.get(), t2.get(), MPFR_RNDN);
    mpfr_div(out.re.get(), out.re.get(), t1.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), x.im.get(), y.re.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), x.re.get(), y.im.get(), MPFR_RNDN);
    mpfr_sub(out.im.get(), out.im.get(), t2.get(), MPFR_RNDN);
    mpfr_div(out.im.get(), out.im.get(), t1.get(), MPFR_RNDN);
}

}  // namespace twistlocal::detail
