#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>

#include "rprove/errors.hpp"

namespace rprove {

// Directed rounding on top of round-to-nearest. Sums are corrected with the
// TwoSum error term, products/quotients/roots with an FMA residual, so the
// result is the exact directed rounding whenever no underflow is involved.
// Near the underflow range we fall back to a one-ulp nudge.
namespace rounding {

inline constexpr double kTiny = 0x1p-900;

inline double next_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
inline double next_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }

// Error e with a + b = s + e exactly (valid when s is finite).
inline double two_sum_err(double a, double b, double s)
{
    const double bp = s - a;
    return (a - (s - bp)) + (b - bp);
}

inline double add_down(double a, double b)
{
    const double s = a + b;
    if (!std::isfinite(s)) {
        if (std::isinf(s) && std::isfinite(a) && std::isfinite(b) && s > 0) {
            return std::numeric_limits<double>::max();
        }
        return s;
    }
    return two_sum_err(a, b, s) < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b)
{
    const double s = a + b;
    if (!std::isfinite(s)) {
        if (std::isinf(s) && std::isfinite(a) && std::isfinite(b) && s < 0) {
            return std::numeric_limits<double>::lowest();
        }
        return s;
    }
    return two_sum_err(a, b, s) > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b)
{
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double p = a * b;
    if (std::isinf(p)) {
        return (p > 0 && std::isfinite(a) && std::isfinite(b)) ? std::numeric_limits<double>::max() : p;
    }
    if (std::fabs(p) < kTiny) {
        return next_down(p);
    }
    return std::fma(a, b, -p) < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b)
{
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double p = a * b;
    if (std::isinf(p)) {
        return (p < 0 && std::isfinite(a) && std::isfinite(b)) ? std::numeric_limits<double>::lowest() : p;
    }
    if (std::fabs(p) < kTiny) {
        return next_up(p);
    }
    return std::fma(a, b, -p) > 0 ? next_up(p) : p;
}

// Sign of (a/b - q) from the exact remainder a - q*b.
inline int div_residual_sign(double a, double b, double q)
{
    const double r = std::fma(-q, b, a);
    if (r == 0.0) {
        return 0;
    }
    return ((r > 0) == (b > 0)) ? 1 : -1;
}

inline double div_down(double a, double b)
{
    if (a == 0.0 && b != 0.0) {
        return 0.0;
    }
    const double q = a / b;
    if (!std::isfinite(q) || std::fabs(q) < kTiny || std::fabs(a) < kTiny || std::isinf(b)) {
        return std::isnan(q) ? q : next_down(q);
    }
    return div_residual_sign(a, b, q) < 0 ? next_down(q) : q;
}

inline double div_up(double a, double b)
{
    if (a == 0.0 && b != 0.0) {
        return 0.0;
    }
    const double q = a / b;
    if (!std::isfinite(q) || std::fabs(q) < kTiny || std::fabs(a) < kTiny || std::isinf(b)) {
        return std::isnan(q) ? q : next_up(q);
    }
    return div_residual_sign(a, b, q) > 0 ? next_up(q) : q;
}

inline double sqrt_down(double a)
{
    const double r = std::sqrt(a);
    if (a == 0.0 || std::isinf(a)) {
        return r;
    }
    if (a < kTiny) {
        return std::max(0.0, next_down(r));
    }
    return std::fma(-r, r, a) < 0 ? next_down(r) : r;
}

inline double sqrt_up(double a)
{
    const double r = std::sqrt(a);
    if (a == 0.0 || std::isinf(a)) {
        return r;
    }
    if (a < kTiny) {
        return next_up(r);
    }
    return std::fma(-r, r, a) > 0 ? next_up(r) : r;
}

// libm exp/log are faithful but not correctly rounded; widen by two ulps.
inline double widen_down(double x) { return next_down(next_down(x)); }
inline double widen_up(double x) { return next_up(next_up(x)); }

// x^k for x >= 0, rounded in the requested direction.
inline double pow_down(double x, unsigned k)
{
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) {
        r = std::max(0.0, mul_down(r, x));
    }
    return r;
}

inline double pow_up(double x, unsigned k)
{
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) {
        r = mul_up(r, x);
    }
    return r;
}

} // namespace rounding

// Closed interval [lo, hi] of reals with double endpoints.
class Interval {
public:
    constexpr Interval() noexcept = default;

    // NOLINTNEXTLINE(google-explicit-constructor)
    Interval(double x) : lo_(x), hi_(x)
    {
        if (std::isnan(x)) {
            throw InvalidInterval("interval endpoint is NaN");
        }
    }

    Interval(double lo, double hi) : lo_(lo), hi_(hi)
    {
        if (std::isnan(lo) || std::isnan(hi)) {
            throw InvalidInterval("interval endpoint is NaN");
        }
        if (lo > hi) {
            throw InvalidInterval("interval with lo > hi");
        }
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    // Upper bound on hi - lo.
    double width() const noexcept { return rounding::sub_up(hi_, lo_); }
    double rad() const noexcept { return rounding::mul_up(width(), 0.5); }
    double mid() const noexcept
    {
        if (lo_ == hi_) {
            return lo_;
        }
        const double m = 0.5 * lo_ + 0.5 * hi_;
        return std::clamp(m, lo_, hi_);
    }
    // max |x| over the interval
    double mag() const noexcept { return std::max(std::fabs(lo_), std::fabs(hi_)); }
    // min |x| over the interval
    double mig() const noexcept
    {
        if (lo_ <= 0.0 && hi_ >= 0.0) {
            return 0.0;
        }
        return std::min(std::fabs(lo_), std::fabs(hi_));
    }

    bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const noexcept { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool contains_zero() const noexcept { return contains(0.0); }
    bool is_point() const noexcept { return lo_ == hi_; }
    bool strictly_positive() const noexcept { return lo_ > 0.0; }
    bool strictly_negative() const noexcept { return hi_ < 0.0; }

    // +1 / -1 when the interval excludes zero, 0 otherwise.
    int sign() const noexcept { return strictly_positive() ? 1 : (strictly_negative() ? -1 : 0); }

    friend bool operator==(const Interval& a, const Interval& b) noexcept
    {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    struct Unchecked {};
    constexpr Interval(double lo, double hi, Unchecked) noexcept : lo_(lo), hi_(hi) {}

    friend Interval make_unchecked(double lo, double hi) noexcept;

    double lo_ = 0.0;
    double hi_ = 0.0;
};

inline Interval make_unchecked(double lo, double hi) noexcept { return Interval(lo, hi, Interval::Unchecked{}); }

inline Interval operator-(const Interval& a) noexcept { return make_unchecked(-a.hi(), -a.lo()); }

inline Interval operator+(const Interval& a, const Interval& b) noexcept
{
    return make_unchecked(rounding::add_down(a.lo(), b.lo()), rounding::add_up(a.hi(), b.hi()));
}

inline Interval operator-(const Interval& a, const Interval& b) noexcept
{
    return make_unchecked(rounding::sub_down(a.lo(), b.hi()), rounding::sub_up(a.hi(), b.lo()));
}

inline Interval operator*(const Interval& a, const Interval& b) noexcept
{
    using namespace rounding;
    const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
    if (al >= 0.0) {
        if (bl >= 0.0) {
            return make_unchecked(mul_down(al, bl), mul_up(ah, bh));
        }
        if (bh <= 0.0) {
            return make_unchecked(mul_down(ah, bl), mul_up(al, bh));
        }
        return make_unchecked(mul_down(ah, bl), mul_up(ah, bh));
    }
    if (ah <= 0.0) {
        if (bl >= 0.0) {
            return make_unchecked(mul_down(al, bh), mul_up(ah, bl));
        }
        if (bh <= 0.0) {
            return make_unchecked(mul_down(ah, bh), mul_up(al, bl));
        }
        return make_unchecked(mul_down(al, bh), mul_up(al, bl));
    }
    if (bl >= 0.0) {
        return make_unchecked(mul_down(al, bh), mul_up(ah, bh));
    }
    if (bh <= 0.0) {
        return make_unchecked(mul_down(ah, bl), mul_up(al, bl));
    }
    return make_unchecked(std::min(mul_down(al, bh), mul_down(ah, bl)),
                          std::max(mul_up(al, bl), mul_up(ah, bh)));
}

inline Interval operator/(const Interval& a, const Interval& b)
{
    using namespace rounding;
    if (b.contains_zero()) {
        throw DivisionByZeroInterval();
    }
    const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
    if (bl > 0.0) {
        if (al >= 0.0) {
            return make_unchecked(div_down(al, bh), div_up(ah, bl));
        }
        if (ah <= 0.0) {
            return make_unchecked(div_down(al, bl), div_up(ah, bh));
        }
        return make_unchecked(div_down(al, bl), div_up(ah, bl));
    }
    if (al >= 0.0) {
        return make_unchecked(div_down(ah, bh), div_up(al, bl));
    }
    if (ah <= 0.0) {
        return make_unchecked(div_down(ah, bl), div_up(al, bh));
    }
    return make_unchecked(div_down(ah, bh), div_up(al, bh));
}

inline Interval& operator+=(Interval& a, const Interval& b) noexcept { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) noexcept { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) noexcept { return a = a * b; }
inline Interval& operator/=(Interval& a, const Interval& b) { return a = a / b; }

inline Interval sqr(const Interval& a) noexcept
{
    using namespace rounding;
    if (a.lo() >= 0.0) {
        return make_unchecked(mul_down(a.lo(), a.lo()), mul_up(a.hi(), a.hi()));
    }
    if (a.hi() <= 0.0) {
        return make_unchecked(mul_down(a.hi(), a.hi()), mul_up(a.lo(), a.lo()));
    }
    return make_unchecked(0.0, std::max(mul_up(a.lo(), a.lo()), mul_up(a.hi(), a.hi())));
}

// Integer power by monotonicity/parity cases.
inline Interval pow(const Interval& a, int k)
{
    using namespace rounding;
    if (k == 0) {
        return Interval(1.0);
    }
    if (k < 0) {
        return Interval(1.0) / pow(a, -k);
    }
    const auto n = static_cast<unsigned>(k);
    if (n % 2 == 0) {
        if (a.lo() >= 0.0) {
            return make_unchecked(pow_down(a.lo(), n), pow_up(a.hi(), n));
        }
        if (a.hi() <= 0.0) {
            return make_unchecked(pow_down(-a.hi(), n), pow_up(-a.lo(), n));
        }
        return make_unchecked(0.0, pow_up(a.mag(), n));
    }
    const double lo = a.lo() >= 0.0 ? pow_down(a.lo(), n) : -pow_up(-a.lo(), n);
    const double hi = a.hi() >= 0.0 ? pow_up(a.hi(), n) : -pow_down(-a.hi(), n);
    return make_unchecked(lo, hi);
}

inline Interval sqrt(const Interval& a)
{
    if (a.lo() < 0.0) {
        throw DomainError("sqrt of an interval with negative lower endpoint");
    }
    return make_unchecked(rounding::sqrt_down(a.lo()), rounding::sqrt_up(a.hi()));
}

inline Interval log(const Interval& a)
{
    if (!(a.lo() > 0.0)) {
        throw DomainError("log of an interval not strictly positive");
    }
    auto lower = [](double x) { return x == 1.0 ? 0.0 : rounding::widen_down(std::log(x)); };
    auto upper = [](double x) { return x == 1.0 ? 0.0 : rounding::widen_up(std::log(x)); };
    return make_unchecked(lower(a.lo()), upper(a.hi()));
}

inline Interval exp(const Interval& a) noexcept
{
    auto lower = [](double x) { return x == 0.0 ? 1.0 : std::max(0.0, rounding::widen_down(std::exp(x))); };
    auto upper = [](double x) {
        if (x == 0.0) {
            return 1.0;
        }
        const double e = std::exp(x);
        return std::isinf(e) ? e : rounding::widen_up(e);
    };
    return make_unchecked(lower(a.lo()), upper(a.hi()));
}

inline Interval abs(const Interval& a) noexcept
{
    if (a.lo() >= 0.0) {
        return a;
    }
    if (a.hi() <= 0.0) {
        return -a;
    }
    return make_unchecked(0.0, a.mag());
}

inline Interval hull(const Interval& a, const Interval& b) noexcept
{
    return make_unchecked(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) noexcept
{
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (lo > hi) {
        return std::nullopt;
    }
    return make_unchecked(lo, hi);
}

inline bool strictly_lt(const Interval& a, const Interval& b) noexcept { return a.hi() < b.lo(); }

// Halves sharing the midpoint, so their union is the input.
inline std::pair<Interval, Interval> bisect(const Interval& a) noexcept
{
    const double m = a.mid();
    return {make_unchecked(a.lo(), m), make_unchecked(m, a.hi())};
}

// [lo - r, hi + r] with outward rounding.
inline Interval inflate(const Interval& a, double r) noexcept
{
    return make_unchecked(rounding::sub_down(a.lo(), r), rounding::add_up(a.hi(), r));
}

inline std::ostream& operator<<(std::ostream& os, const Interval& a)
{
    return os << '[' << a.lo() << ", " << a.hi() << ']';
}

enum class ArithOp { add, sub, mul, div, neg };

inline Interval arith(ArithOp op, const Interval& a, const Interval& b)
{
    switch (op) {
    case ArithOp::add:
        return a + b;
    case ArithOp::sub:
        return a - b;
    case ArithOp::mul:
        return a * b;
    case ArithOp::div:
        return a / b;
    case ArithOp::neg:
        return -a;
    }
    return a;
}

enum class ElemFn { sqrt, ln, exp, pow_int };

inline Interval elem(ElemFn fn, const Interval& a, int k = 0)
{
    switch (fn) {
    case ElemFn::sqrt:
        return sqrt(a);
    case ElemFn::ln:
        return log(a);
    case ElemFn::exp:
        return exp(a);
    case ElemFn::pow_int:
        return pow(a, k);
    }
    return a;
}

namespace constants {

inline const Interval& sqrt2()
{
    static const Interval v = sqrt(Interval(2.0));
    return v;
}

inline const Interval& sqrt3()
{
    static const Interval v = sqrt(Interval(3.0));
    return v;
}

inline const Interval& inv_sqrt3()
{
    static const Interval v = Interval(1.0) / sqrt3();
    return v;
}

inline const Interval& ln4()
{
    static const Interval v = log(Interval(4.0));
    return v;
}

} // namespace constants

} // namespace rprove
