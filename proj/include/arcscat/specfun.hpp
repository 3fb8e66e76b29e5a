#pragma once

// Cylinder functions J_n, Y_n, H^(1)_n for complex argument, n = 0,1,2.
//
// Two evaluation regimes:
//   |z| <= 25  : power series accumulated in double-double (compensated)
//                arithmetic; the alternating series loses ~|Im z| + 0.43|z|
//                digits in plain double, the dd accumulator buys them back.
//   |z|  > 25  : large-argument Hankel expansions, truncated at the smallest
//                term; the optimal-truncation error is below 1e-15 there.
// Arguments with |z| > 200 are rejected.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "arcscat/medium.hpp"

namespace arcscat::specfun {

inline constexpr double z_max = 200.0;
inline constexpr double series_cut = 25.0;
inline constexpr double euler_gamma = 0.57721566490153286061;

namespace dd {

// minimal double-double value: hi + lo with |lo| <= ulp(hi)/2
struct Real {
    double hi = 0.0;
    double lo = 0.0;
};

inline Real quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline Real two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline Real two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline Real add(Real a, Real b) {
    Real s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline Real sub(Real a, Real b) { return add(a, {-b.hi, -b.lo}); }

inline Real mul(Real a, Real b) {
    Real p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline Real div_d(Real a, double d) {
    const double q1 = a.hi / d;
    const Real p = two_prod(q1, d);
    const double q2 = ((a.hi - p.hi) - p.lo + a.lo) / d;
    return quick_two_sum(q1, q2);
}

inline Real div(Real a, Real b) {
    const double q1 = a.hi / b.hi;
    const Real r = sub(a, mul(b, {q1, 0.0}));
    const double q2 = (r.hi + r.lo) / b.hi;
    return quick_two_sum(q1, q2);
}

inline double to_double(Real a) { return a.hi + a.lo; }

struct Complex {
    Real re;
    Real im;
};

inline Complex from(cd z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }

inline Complex add(Complex a, Complex b) { return {add(a.re, b.re), add(a.im, b.im)}; }
inline Complex sub(Complex a, Complex b) { return {sub(a.re, b.re), sub(a.im, b.im)}; }

inline Complex mul(Complex a, Complex b) {
    return {sub(mul(a.re, b.re), mul(a.im, b.im)),
            add(mul(a.re, b.im), mul(a.im, b.re))};
}

inline Complex div_d(Complex a, double d) { return {div_d(a.re, d), div_d(a.im, d)}; }

inline Complex scale(Complex a, double d) {
    return {mul(a.re, {d, 0.0}), mul(a.im, {d, 0.0})};
}

inline cd to_cd(Complex a) { return {to_double(a.re), to_double(a.im)}; }

inline double abs2_hi(Complex a) { return a.re.hi * a.re.hi + a.im.hi * a.im.hi; }

inline constexpr Real ln2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr Real neg_euler{-0.5772156649015329, 4.942915152430645e-18};
inline constexpr Real pi_half{1.5707963267948966, 6.123233995736766e-17};
inline constexpr Real two_over_pi{0.6366197723675814, -3.935735335036497e-17};

inline Real ldexp(Real a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }

// e^a for double a, |a| moderate: a = m ln2 + s, Taylor in s
inline Real exp(double a) {
    const int m = int(std::lround(a / 0.6931471805599453));
    const Real p = two_prod(double(m), ln2.hi);  // m*ln2.hi exactly
    Real s = add(two_sum(a, -p.hi), {-p.lo - m * ln2.lo, 0.0});
    Real term{1.0, 0.0};
    Real sum = term;
    for (int k = 1; k <= 26; ++k) {
        term = div_d(mul(term, s), double(k));
        sum = add(sum, term);
        if (std::abs(term.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    return ldexp(sum, m);
}

// natural log of a positive dd value, Newton correction of the double log
inline Real log(Real x) {
    const double l0 = std::log(to_double(x));
    Real u = sub(mul(exp(-l0), x), {1.0, 0.0});
    return add(add({l0, 0.0}, u), mul(mul(u, u), {-0.5, 0.0}));
}

inline void sincos(double a, Real& s, Real& c) {
    const int j = int(std::lround(a / 1.5707963267948966));
    const Real p = two_prod(double(j), pi_half.hi);
    Real r = add(two_sum(a, -p.hi), {-p.lo - j * pi_half.lo, 0.0});
    Real sn{0.0, 0.0}, cs{1.0, 0.0};
    Real term{1.0, 0.0};
    for (int k = 1; k <= 24; ++k) {
        term = div_d(mul(term, r), double(k));
        if (k % 2 == 1) sn = (k % 4 == 1) ? add(sn, term) : sub(sn, term);
        else cs = (k % 4 == 0) ? add(cs, term) : sub(cs, term);
        if (std::abs(term.hi) < 1e-35) break;
    }
    switch (((j % 4) + 4) % 4) {
        case 0: s = sn; c = cs; break;
        case 1: s = cs; c = {-sn.hi, -sn.lo}; break;
        case 2: s = {-sn.hi, -sn.lo}; c = {-cs.hi, -cs.lo}; break;
        default: s = {-cs.hi, -cs.lo}; c = sn; break;
    }
}

inline Real atan2(double y, double x) {
    const double t0 = std::atan2(y, x);
    Real s, c;
    sincos(t0, s, c);
    const Real e = sub(mul({y, 0.0}, c), mul({x, 0.0}, s));
    const double rho = std::hypot(x, y);
    return add({t0, 0.0}, div_d(e, rho));
}

// principal complex log of a double-complex value
inline Complex log(cd z) {
    const Real nr = add(two_prod(z.real(), z.real()), two_prod(z.imag(), z.imag()));
    return {mul(log(nr), {0.5, 0.0}), atan2(z.imag(), z.real())};
}

inline Complex mulr(Complex a, Real r) { return {mul(a.re, r), mul(a.im, r)}; }

inline Complex inv(cd z) {
    const Real nr = add(two_prod(z.real(), z.real()), two_prod(z.imag(), z.imag()));
    const Real re = div({z.real(), 0.0}, nr);
    const Real im = div({-z.imag(), 0.0}, nr);
    return {re, im};
}

// a + i b
inline Complex add_i_times(Complex a, Complex b) {
    return {sub(a.re, b.im), add(a.im, b.re)};
}

}  // namespace dd

namespace detail {

inline void check_argument(cd z) {
    if (!(std::abs(z) <= z_max))
        throw std::domain_error("specfun: argument magnitude exceeds supported range");
}

// Series values for orders 0..2 plus the regular part of H1(z)/z used by
// stable kernel evaluation. All sums run in dd arithmetic; H = J + iY is
// also combined in dd since the two parts cancel to ~e^{-2 Im z} of their
// own size.
struct SeriesVals {
    cd j0, j1, j2;
    cd h0, h1, h2;
    cd s_reg;    // sum_m (psi(m+1)+psi(m+2)) (-z^2/4)^m / (m! (m+1)!)
    cd y2_tail;  // (z/2)^2 sum_m (psi(m+1)+psi(m+3)) (-z^2/4)^m / (m! (m+2)!)
};

inline SeriesVals small_series(cd z) {
    const dd::Complex w = dd::scale(dd::mul(dd::from(z), dd::from(z)), -0.25);  // -z^2/4
    const dd::Complex half_z = dd::scale(dd::from(z), 0.5);

    // term recurrences over m; t_n is the m-th term of J_n without the
    // leading (z/2)^n factor for n=1,2 (applied at the end)
    dd::Complex t0{{1.0, 0.0}, {0.0, 0.0}};
    dd::Complex t1 = t0, t2 = t0;
    dd::Complex j0 = t0, j1 = t0;
    dd::Complex j2 = dd::div_d(t0, 2.0);
    t2 = j2;
    // digamma-weighted sums for Y_n (DLMF 10.8.1 layout), m = 0 terms included
    dd::Real psi1 = dd::neg_euler;                       // psi(m+1)
    dd::Real psi2 = dd::add(psi1, {1.0, 0.0});           // psi(m+2)
    dd::Real psi3 = dd::add(psi2, {0.5, 0.0});           // psi(m+3)
    dd::Complex y0s = dd::mulr(t0, psi1);
    dd::Complex y1s = dd::mulr(t1, dd::add(psi1, psi2));
    dd::Complex y2s = dd::mulr(t2, dd::add(psi1, psi3));

    // |term|^2 / |sum|^2 cutoff; must sit near the dd floor, not at the
    // target accuracy, because J + iY cancels by up to e^{-2 Im z}
    const double tol2 = 1e-46;
    for (int m = 1; m <= 120; ++m) {
        t0 = dd::div_d(dd::mul(t0, w), double(m) * m);
        t1 = dd::div_d(dd::mul(t1, w), double(m) * (m + 1.0));
        t2 = dd::div_d(dd::mul(t2, w), double(m) * (m + 2.0));
        j0 = dd::add(j0, t0);
        j1 = dd::add(j1, t1);
        j2 = dd::add(j2, t2);
        psi1 = dd::add(psi1, dd::div_d(dd::Real{1.0, 0.0}, m));
        psi2 = dd::add(psi2, dd::div_d(dd::Real{1.0, 0.0}, m + 1.0));
        psi3 = dd::add(psi3, dd::div_d(dd::Real{1.0, 0.0}, m + 2.0));
        y0s = dd::add(y0s, dd::mulr(t0, psi1));
        y1s = dd::add(y1s, dd::mulr(t1, dd::add(psi1, psi2)));
        y2s = dd::add(y2s, dd::mulr(t2, dd::add(psi1, psi3)));
        if (dd::abs2_hi(t0) < tol2 * dd::abs2_hi(j0) &&
            dd::abs2_hi(t1) < tol2 * std::max(1.0, dd::abs2_hi(j1)) &&
            dd::abs2_hi(t2) < tol2 * std::max(1.0, dd::abs2_hi(j2)))
            break;
    }

    const dd::Complex zf1 = half_z;                 // (z/2)
    const dd::Complex zf2 = dd::mul(half_z, half_z);
    const dd::Complex J0 = j0;
    const dd::Complex J1 = dd::mul(zf1, j1);
    const dd::Complex J2 = dd::mul(zf2, j2);

    SeriesVals out;
    out.j0 = dd::to_cd(J0);
    out.j1 = dd::to_cd(J1);
    out.j2 = dd::to_cd(J2);
    out.s_reg = dd::to_cd(y1s);
    out.y2_tail = dd::to_cd(dd::mul(zf2, y2s));

    const dd::Complex lz = dd::log(0.5 * z);
    const dd::Complex invz = dd::inv(z);
    const dd::Complex one{{1.0, 0.0}, {0.0, 0.0}};
    // Y0 = (2/pi) [ln(z/2) J0 - sum psi(m+1) (-z^2/4)^m / (m!)^2]
    const dd::Complex Y0 = dd::mulr(dd::sub(dd::mul(lz, J0), y0s), dd::two_over_pi);
    // Y1 = (2/pi) [ln(z/2) J1 - 1/z - (z/4) sum_1]
    const dd::Complex Y1 = dd::mulr(
        dd::sub(dd::sub(dd::mul(lz, J1), invz), dd::scale(dd::mul(zf1, y1s), 0.5)),
        dd::two_over_pi);
    // Y2 = (2/pi) [ln(z/2) J2 - (2/z^2 + 1/2) - (z^2/8) sum_2]
    const dd::Complex poly = dd::add(dd::scale(dd::mul(invz, invz), 4.0), one);
    const dd::Complex Y2 = dd::mulr(
        dd::sub(dd::mul(lz, J2), dd::scale(dd::add(poly, dd::mul(zf2, y2s)), 0.5)),
        dd::two_over_pi);
    out.h0 = dd::to_cd(dd::add_i_times(J0, Y0));
    out.h1 = dd::to_cd(dd::add_i_times(J1, Y1));
    out.h2 = dd::to_cd(dd::add_i_times(J2, Y2));
    return out;
}

// large-argument expansion of H^(1)_nu and H^(2)_nu
inline cd hankel_asym(int nu, cd z, int kind) {
    const cd i(0.0, 1.0);
    const cd isign = (kind == 1) ? i : -i;
    const double fournu2 = 4.0 * nu * nu;
    cd term(1.0, 0.0);
    cd sum = term;
    double last = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double num = fournu2 - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= isign * num / (8.0 * k * z);
        const double mag = std::abs(term);
        if (mag > last) break;  // optimal truncation
        sum += term;
        last = mag;
        if (mag < 1e-18 * std::abs(sum)) break;
    }
    const cd omega = z - (0.5 * nu + 0.25) * M_PI;
    const cd phase = (kind == 1) ? std::exp(i * omega) : std::exp(-i * omega);
    return std::sqrt(2.0 / (M_PI * z)) * phase * sum;
}

}  // namespace detail

inline cd bessel_j(int n, cd z) {
    if (n < 0 || n > 2) throw std::invalid_argument("bessel_j: order must be 0, 1 or 2");
    detail::check_argument(z);
    if (std::abs(z) <= series_cut) {
        const auto s = detail::small_series(z);
        return n == 0 ? s.j0 : (n == 1 ? s.j1 : s.j2);
    }
    return 0.5 * (detail::hankel_asym(n, z, 1) + detail::hankel_asym(n, z, 2));
}

inline cd hankel1(int n, cd z) {
    if (n < 0 || n > 2) throw std::invalid_argument("hankel1: order must be 0, 1 or 2");
    detail::check_argument(z);
    if (std::abs(z) == 0.0) throw std::domain_error("hankel1: logarithmic singularity at z = 0");
    if (std::abs(z) <= series_cut) {
        const auto s = detail::small_series(z);
        return n == 0 ? s.h0 : (n == 1 ? s.h1 : s.h2);
    }
    return detail::hankel_asym(n, z, 1);
}

// Bundle used by kernel assembly: everything needed per (wavenumber, radius)
// pair. gstable is (-i/4) k^2 H1(kr)/(kr) + 1/(2 pi r^2) with the 1/r^2
// singularity removed analytically rather than by subtraction.
struct CylVals {
    cd j0, j1, j2;
    cd h0, h1, h2;
    cd gamma;     // (i/4) H0(kr)
    cd gstable;
    cd g2stable;  // (i/4) k^2 H2(kr) - 1/(pi r^2), 1/r^2 removed analytically
};

inline CylVals cyl_eval(cd k, double r) {
    const cd z = k * r;
    const double az = std::abs(z);
    if (!(az > 0.0)) throw std::domain_error("cyl_eval: zero argument");
    detail::check_argument(z);
    const cd i(0.0, 1.0);
    CylVals v;
    if (az <= series_cut) {
        const auto s = detail::small_series(z);
        v.j0 = s.j0;
        v.j1 = s.j1;
        v.j2 = s.j2;
        v.h0 = s.h0;
        v.h1 = s.h1;
        v.h2 = s.h2;
        if (az <= 1.0) {
            // series form: the 1/(pi r^2) part cancels against the leading Y2 term
            const cd lz = std::log(0.5 * z);
            v.g2stable = (i / 4.0) * (k * k) * s.j2 - (k * k / (2.0 * M_PI)) * lz * s.j2 +
                         k * k / (4.0 * M_PI) + (k * k / (4.0 * M_PI)) * s.y2_tail;
            // series form of H1(z)/z + 2i/(pi z^2): the 1/z^2 parts cancel
            // exactly against the leading Y1 term
            const cd x = s.j1 / z + i * (2.0 / M_PI) * lz * (s.j1 / z) - i / (2.0 * M_PI) * s.s_reg;
            v.gstable = (-i / 4.0) * (k * k) * x;
        } else {
            v.g2stable = (i / 4.0) * (k * k) * s.h2 - 1.0 / (M_PI * r * r);
            const cd x = v.h1 / z + 2.0 * i / (M_PI * z * z);
            v.gstable = (-i / 4.0) * (k * k) * x;
        }
    } else {
        v.h0 = detail::hankel_asym(0, z, 1);
        v.h1 = detail::hankel_asym(1, z, 1);
        v.h2 = (2.0 / z) * v.h1 - v.h0;
        v.j0 = 0.5 * (v.h0 + detail::hankel_asym(0, z, 2));
        v.j1 = 0.5 * (v.h1 + detail::hankel_asym(1, z, 2));
        v.j2 = (2.0 / z) * v.j1 - v.j0;
        v.gstable = (-i / 4.0) * (k * k) * (v.h1 / z) + 1.0 / (2.0 * M_PI * r * r);
        v.g2stable = (i / 4.0) * (k * k) * v.h2 - 1.0 / (M_PI * r * r);
    }
    v.gamma = (i / 4.0) * v.h0;
    return v;
}

}  // namespace arcscat::specfun
