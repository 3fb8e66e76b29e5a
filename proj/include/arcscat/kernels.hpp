#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "medium.hpp"
#include "specfun.hpp"

namespace arcscat::kernels {

using cd = std::complex<double>;
using Coef3 = std::array<cd, 3>;

// Everything derived from the medium that kernel evaluation needs.
// Wavenumber slots are ordered {ks, k1, k2}; combination coefficient
// vectors below index into that order.
struct WaveCtx {
    MediumParams med;
    WaveNumbers wn;
    RegularizationConstants rc;
    Coef3 k;        // {ks, k1, k2}
    cd d12;         // k1^2 - k2^2
    cd s2;          // ks^2 - kp^2
    cd ca, cb;      // Hessian combination: gamma_ks - ca gamma_1 + cb gamma_2
    Coef3 fc;       // {1, -ca, cb}, sums to zero
    Coef3 e22c;     // pressure-pressure trace combination, sums to one
    cd c12, c21;    // coupling gradient prefactors
    double lp2m = 0.0;     // lambda + 2 mu
    double rho_om2 = 0.0;  // rho omega^2
    cd i_om_eta;           // i omega eta
};

inline WaveCtx make_wave_ctx(const MediumParams& m) {
    WaveCtx c;
    c.med = m;
    c.wn = compute_wavenumbers(m);
    c.rc = regularization_constants(m, c.wn);
    c.k = {cd(c.wn.ks, 0.0), c.wn.k1, c.wn.k2};
    c.d12 = c.wn.k1sq() - c.wn.k2sq();
    const cd kp2 = cd(c.wn.kp * c.wn.kp, 0.0);
    c.s2 = cd(c.wn.ks * c.wn.ks, 0.0) - kp2;
    c.ca = (kp2 - c.wn.k2sq()) / c.d12;
    c.cb = (kp2 - c.wn.k1sq()) / c.d12;
    c.fc = {cd(1.0, 0.0), -c.ca, c.cb};
    c.e22c = {cd(0.0, 0.0), -(kp2 - c.wn.k1sq()) / c.d12, (kp2 - c.wn.k2sq()) / c.d12};
    c.lp2m = m.lambda + 2.0 * m.mu;
    c.rho_om2 = m.rho * m.omega * m.omega;
    c.i_om_eta = cd(0.0, m.omega * m.eta);
    c.c12 = c.i_om_eta / (c.d12 * c.lp2m);
    c.c21 = -m.gamma / (c.d12 * c.lp2m);
    return c;
}

// Geometry of one quadrature node on the arc.
struct NodeGeom {
    double theta = 0.0;  // angular parameter
    double t = 0.0;      // t = cos(theta) in [-1,1]
    double jac = 0.0;    // |x'(t)|
    Vec2 x{};            // position
    Vec2 xp{};           // derivative x'(t)
    Vec2 nu{};           // unit normal (x2', -x1')/|x'|
};

inline NodeGeom node_geom(const ArcParametrization& arc, double theta) {
    NodeGeom g;
    g.theta = theta;
    g.t = std::cos(theta);
    g.x = arc.position(g.t);
    g.xp = arc.derivative(g.t);
    g.jac = std::hypot(g.xp[0], g.xp[1]);
    g.nu = {g.xp[1] / g.jac, -g.xp[0] / g.jac};
    return g;
}

// Stabilized radial primitives for one wavenumber at distance r. All the
// log-splitting below is expressed through these six quantities.
struct PrimK {
    cd gamma;     // (i/4) H0(kr)
    cd j0;        // J0(kr)
    cd gs1;       // (k/2pi) J1(kr)/r, log coefficient of gstable
    cd gstable;   // -(i/4) k^2 H1(kr)/(kr) + 1/(2 pi r^2)
    cd gs2;       // -(k^2/2pi) J2(kr), log coefficient of g2stable
    cd g2stable;  // (i/4) k^2 H2(kr) - 1/(pi r^2)
};

// Pair of nodes plus the radial primitives for all three wavenumbers.
struct PairData {
    const NodeGeom* x = nullptr;
    const NodeGeom* y = nullptr;
    double r = 0.0;
    Vec2 d{};   // x - y
    Vec2 du{};  // (x - y)/r
    std::array<PrimK, 3> p{};
};

inline PairData make_pair(const WaveCtx& wc, const NodeGeom& xg, const NodeGeom& yg) {
    PairData pd;
    pd.x = &xg;
    pd.y = &yg;
    pd.d = {xg.x[0] - yg.x[0], xg.x[1] - yg.x[1]};
    pd.r = std::hypot(pd.d[0], pd.d[1]);
    if (!(pd.r > 0.0)) throw std::domain_error("coincident pair of nodes");
    pd.du = {pd.d[0] / pd.r, pd.d[1] / pd.r};
    constexpr double two_pi = 2.0 * M_PI;
    for (int m = 0; m < 3; ++m) {
        const auto v = specfun::cyl_eval(wc.k[m], pd.r);
        PrimK& p = pd.p[m];
        p.gamma = v.gamma;
        p.j0 = v.j0;
        p.gs1 = (wc.k[m] / two_pi) * v.j1 / pd.r;
        p.gstable = v.gstable;
        p.gs2 = -(wc.k[m] * wc.k[m] / two_pi) * v.j2;
        p.g2stable = v.g2stable;
    }
    return pd;
}

// ---- combination helpers over the {ks, k1, k2} slots ----------------------
//
// S-type: sum_m c_m gamma_{k_m}; split value = logc * log|t - tau| + rest.
// G-type: sum_m c_m f1(k_m), valid when sum c = 0 (the 1/r^2 parts cancel);
// same for the second-order G2-type with f2 r^2.

inline cd sval(const PairData& p, const Coef3& c) {
    return c[0] * p.p[0].gamma + c[1] * p.p[1].gamma + c[2] * p.p[2].gamma;
}

inline cd s_logc(const PairData& p, const Coef3& c) {
    return -(c[0] * p.p[0].j0 + c[1] * p.p[1].j0 + c[2] * p.p[2].j0) / (2.0 * M_PI);
}

inline cd s_diag_logc(const Coef3& c) { return -(c[0] + c[1] + c[2]) / (2.0 * M_PI); }

inline cd s_diag_one(cd k, double jac) {
    return cd(0.0, 0.25) - (std::log(k * jac * 0.5) + specfun::euler_gamma) / (2.0 * M_PI);
}

inline cd s_diag_reg(const WaveCtx& wc, const Coef3& c, double jac) {
    cd s = 0.0;
    for (int m = 0; m < 3; ++m)
        if (c[m] != 0.0) s += c[m] * s_diag_one(wc.k[m], jac);
    return s;
}

inline cd gval(const PairData& p, const Coef3& c) {
    return c[0] * p.p[0].gstable + c[1] * p.p[1].gstable + c[2] * p.p[2].gstable;
}

inline cd g_logc(const PairData& p, const Coef3& c) {
    return c[0] * p.p[0].gs1 + c[1] * p.p[1].gs1 + c[2] * p.p[2].gs1;
}

inline cd g_diag_logc(const WaveCtx& wc, const Coef3& c) {
    cd s = 0.0;
    for (int m = 0; m < 3; ++m) s += c[m] * wc.k[m] * wc.k[m];
    return s / (4.0 * M_PI);
}

inline cd g_diag_reg(const WaveCtx& wc, const Coef3& c, double jac) {
    cd s = 0.0;
    for (int m = 0; m < 3; ++m) {
        if (c[m] == 0.0) continue;
        const cd k2 = wc.k[m] * wc.k[m];
        s += c[m] * k2 *
             (std::log(jac) / (4.0 * M_PI) + cd(0.0, -0.125) +
              std::log(0.5 * wc.k[m]) / (4.0 * M_PI) +
              (2.0 * specfun::euler_gamma - 1.0) / (8.0 * M_PI));
    }
    return s;
}

inline cd g2val(const PairData& p, const Coef3& c) {
    return c[0] * p.p[0].g2stable + c[1] * p.p[1].g2stable + c[2] * p.p[2].g2stable;
}

inline cd g2_logc(const PairData& p, const Coef3& c) {
    return c[0] * p.p[0].gs2 + c[1] * p.p[1].gs2 + c[2] * p.p[2].gs2;
}

inline cd g2_diag_reg(const WaveCtx& wc, const Coef3& c) {
    cd s = 0.0;
    for (int m = 0; m < 3; ++m) s += c[m] * wc.k[m] * wc.k[m];
    return s / (4.0 * M_PI);
}

// ---- fundamental solution -------------------------------------------------

// Elastic 2x2 block of the fundamental solution; fills row-major 2x2
// log coefficient and value.
inline void e11_eval(const WaveCtx& wc, const PairData& p, cd* logc, cd* val) {
    const cd sv = p.p[0].gamma / wc.med.mu;
    const cd sa = -p.p[0].j0 / (2.0 * M_PI * wc.med.mu);
    const cd gv = gval(p, wc.fc) / wc.rho_om2;
    const cd ga = g_logc(p, wc.fc) / wc.rho_om2;
    const cd g2v = g2val(p, wc.fc) / wc.rho_om2;
    const cd g2a = g2_logc(p, wc.fc) / wc.rho_om2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double dd = p.du[a] * p.du[b];
            const double id = a == b ? 1.0 : 0.0;
            logc[2 * a + b] = (sa + ga) * id + g2a * dd;
            val[2 * a + b] = (sv + gv) * id + g2v * dd;
        }
}

inline void e11_diag(const WaveCtx& wc, const NodeGeom& g, cd* logc, cd* reg) {
    const cd adiag = -1.0 / (2.0 * M_PI * wc.med.mu) + wc.s2 / (4.0 * M_PI * wc.rho_om2);
    const cd biso = s_diag_one(wc.k[0], g.jac) / wc.med.mu + g_diag_reg(wc, wc.fc, g.jac) / wc.rho_om2;
    const cd btan = g2_diag_reg(wc, wc.fc) / wc.rho_om2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double tt = g.xp[a] * g.xp[b] / (g.jac * g.jac);
            const double id = a == b ? 1.0 : 0.0;
            logc[2 * a + b] = adiag * id;
            reg[2 * a + b] = biso * id + btan * tt;
        }
}

// Full 3x3 fundamental solution at separated points (rows/cols: u1, u2, p).
inline std::array<std::array<cd, 3>, 3> eval_fundamental(const WaveCtx& wc, const Vec2& x,
                                                         const Vec2& y) {
    NodeGeom gx, gy;
    gx.x = x;
    gy.x = y;
    const PairData p = make_pair(wc, gx, gy);
    std::array<std::array<cd, 3>, 3> e{};
    const cd sv = p.p[0].gamma / wc.med.mu;
    const cd gv = gval(p, wc.fc) / wc.rho_om2;
    const cd g2v = g2val(p, wc.fc) / wc.rho_om2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            e[a][b] = (a == b ? sv + gv : cd(0.0)) + g2v * p.du[a] * p.du[b];
    const Coef3 gc = {cd(0.0), cd(1.0), cd(-1.0)};
    const cd grad = gval(p, gc);
    for (int a = 0; a < 2; ++a) {
        e[a][2] = wc.c12 * grad * p.d[a];
        e[2][a] = wc.c21 * grad * p.d[a];
    }
    e[2][2] = sval(p, wc.e22c);
    return e;
}

// ---- radial derivative cascade and traction helpers -----------------------

// f_m = (i/4)(-1)^m k^{2m} H_m(z)/z^m, so that for radial F(r):
// grad_x F = f1 d, Hess_x F = f1 I + f2 d d^T, with d = x - y.
struct RadialF {
    cd f0, f1, f2, f3;
};

inline RadialF radial_cascade(cd k, double r) {
    const auto v = specfun::cyl_eval(k, r);
    const cd z = k * r;
    const cd i4(0.0, 0.25);
    const cd h3 = (4.0 / z) * v.h2 - v.h1;
    RadialF f;
    f.f0 = i4 * v.h0;
    f.f1 = -i4 * k * k * v.h1 / z;
    f.f2 = i4 * std::pow(k, 4) * v.h2 / (z * z);
    f.f3 = -i4 * std::pow(k, 6) * h3 / (z * z * z);
    return f;
}

// Traction at y (normal nu, d = x - y) of the field u(y) = s(r) c with c a
// constant vector; f1s = s'(r)/r.
inline void traction_radial_const(const MediumParams& m, cd f1s, const Vec2& d, const Vec2& nu,
                                  const cd c[2], cd out[2]) {
    const cd dc = d[0] * c[0] + d[1] * c[1];
    const double nd = nu[0] * d[0] + nu[1] * d[1];
    const cd nc = nu[0] * c[0] + nu[1] * c[1];
    for (int a = 0; a < 2; ++a)
        out[a] = -m.lambda * f1s * dc * nu[a] - m.mu * f1s * (nd * c[a] + nc * d[a]);
}

// Traction at y of the gradient field u(y) = grad_x F for radial F.
inline void traction_gradient(const MediumParams& m, const cd f[3], double r, const Vec2& d,
                              const Vec2& nu, cd out[2]) {
    const double nd = nu[0] * d[0] + nu[1] * d[1];
    const cd div = -(f[2] * r * r + 2.0 * f[1]);
    for (int a = 0; a < 2; ++a)
        out[a] = m.lambda * nu[a] * div - 2.0 * m.mu * (f[2] * nd * d[a] + f[1] * nu[a]);
}

// Traction at y of the j-th Hessian column u(y) = (Hess_x F) e_j.
inline void traction_hessian_col(const MediumParams& m, const cd f[4], double r, const Vec2& d,
                                 const Vec2& nu, int j, cd out[2]) {
    const double nd = nu[0] * d[0] + nu[1] * d[1];
    for (int a = 0; a < 2; ++a) {
        const double id = a == j ? 1.0 : 0.0;
        out[a] = 2.0 * m.mu *
                     (-f[2] * nd * id - f[3] * nd * d[a] * d[j] - f[2] * (nu[a] * d[j] + d[a] * nu[j])) +
                 m.lambda * nu[a] * (-(4.0 * f[2] + f[3] * r * r) * d[j]);
    }
}

// Traction/conormal data of the fundamental solution taken at y: tu holds
// T_y applied to the displacement part of column n, dp the conormal
// derivative of the pressure row, e the plain value.
struct TractionOfE {
    cd tu[2][3];
    cd dp[3];
    cd e[3][3];
};

inline TractionOfE traction_y_fundamental(const WaveCtx& wc, const Vec2& x, const Vec2& y,
                                          const Vec2& nu_y) {
    TractionOfE out;
    const Vec2 d = {x[0] - y[0], x[1] - y[1]};
    const double r = std::hypot(d[0], d[1]);
    if (!(r > 0.0)) throw std::domain_error("coincident points");
    const RadialF fks = radial_cascade(wc.k[0], r);
    const RadialF f1w = radial_cascade(wc.k[1], r);
    const RadialF f2w = radial_cascade(wc.k[2], r);
    const double nd = nu_y[0] * d[0] + nu_y[1] * d[1];

    {
        const auto e = eval_fundamental(wc, x, y);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out.e[a][b] = e[a][b];
    }

    // columns 0,1: E11_(.,n) = (1/mu) gamma_ks e_n + (1/rho w^2) sum fc Hess col n
    for (int n = 0; n < 2; ++n) {
        cd acc[2] = {0.0, 0.0}, tmp[2];
        cd en[2] = {n == 0 ? 1.0 : 0.0, n == 1 ? 1.0 : 0.0};
        traction_radial_const(wc.med, fks.f1, d, nu_y, en, tmp);
        acc[0] += tmp[0] / wc.med.mu;
        acc[1] += tmp[1] / wc.med.mu;
        const RadialF* fs[3] = {&fks, &f1w, &f2w};
        for (int m = 0; m < 3; ++m) {
            const cd fm[4] = {fs[m]->f0, fs[m]->f1, fs[m]->f2, fs[m]->f3};
            traction_hessian_col(wc.med, fm, r, d, nu_y, n, tmp);
            acc[0] += wc.fc[m] * tmp[0] / wc.rho_om2;
            acc[1] += wc.fc[m] * tmp[1] / wc.rho_om2;
        }
        out.tu[0][n] = acc[0];
        out.tu[1][n] = acc[1];
        // pressure row: E_{2,n} = c21 (f1^(1) - f1^(2)) d_n
        const cd g1 = f1w.f1 - f2w.f1;
        const cd g2 = f1w.f2 - f2w.f2;
        out.dp[n] = wc.c21 * (-g2 * nd * d[n] - g1 * nu_y[n]);
    }

    // column 2: E12 = c12 grad_x (gamma_1 - gamma_2)
    {
        const cd fm[3] = {wc.c12 * (f1w.f0 - f2w.f0), wc.c12 * (f1w.f1 - f2w.f1),
                          wc.c12 * (f1w.f2 - f2w.f2)};
        cd tmp[2];
        traction_gradient(wc.med, fm, r, d, nu_y, tmp);
        out.tu[0][2] = tmp[0];
        out.tu[1][2] = tmp[1];
        cd dn = 0.0;
        for (int m = 0; m < 3; ++m) {
            if (wc.e22c[m] == 0.0) continue;
            const RadialF* fs[3] = {&fks, &f1w, &f2w};
            dn += wc.e22c[m] * (-fs[m]->f1) * nd;
        }
        out.dp[2] = dn;
    }
    return out;
}

// ---- regularized operator families ----------------------------------------

// One additive term of a boundary-operator family. The term occupies the
// block (r0..r0+nr-1, c0..c0+nc-1) of the 3x3 system (rows/cols: u1,u2,p),
// optionally wrapped by the tangential derivative D_s on the left and the
// weighted derivative D_s^w on the right. wexp = a means the quadrature
// weight carries sin(theta')^{1+a}.
struct FamilyTerm {
    int r0 = 0, c0 = 0, nr = 0, nc = 0;
    bool left_ds = false, right_dsw = false;
    int wexp = -1;
    // fills nr*nc row-major log coefficient and plain kernel value
    std::function<void(const PairData&, cd* logc, cd* val)> eval;
    // coincidence limits: log coefficient and regular part
    std::function<void(const NodeGeom&, cd* logc, cd* reg)> diag;
};

namespace detail {

inline void zero_diag(const NodeGeom&, cd* logc, cd* reg) {
    for (int i = 0; i < 4; ++i) {
        logc[i] = 0.0;
        reg[i] = 0.0;
    }
}

// conjugation by the rotation A = [[0,-1],[1,0]]: (A M A) in place
inline void rot_conj(cd* m) {
    const cd m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
    m[0] = -m11;
    m[1] = m10;
    m[2] = m01;
    m[3] = -m00;
}

}  // namespace detail

// Weighted single-layer family: the transposed fundamental solution with
// the inverse edge weight on every block.
inline std::vector<FamilyTerm> single_layer_family(const WaveCtx& wc) {
    const Coef3 gc = {cd(0.0), cd(1.0), cd(-1.0)};
    std::vector<FamilyTerm> fam;

    FamilyTerm uu;
    uu.r0 = 0; uu.c0 = 0; uu.nr = 2; uu.nc = 2; uu.wexp = -1;
    uu.eval = [wc](const PairData& p, cd* a, cd* v) { e11_eval(wc, p, a, v); };
    uu.diag = [wc](const NodeGeom& g, cd* a, cd* b) { e11_diag(wc, g, a, b); };
    fam.push_back(uu);

    FamilyTerm up;  // E21 = c21 grad (gamma_1 - gamma_2)
    up.r0 = 0; up.c0 = 2; up.nr = 2; up.nc = 1; up.wexp = -1;
    up.eval = [wc, gc](const PairData& p, cd* a, cd* v) {
        const cd gv = wc.c21 * gval(p, gc);
        const cd ga = wc.c21 * g_logc(p, gc);
        for (int i = 0; i < 2; ++i) {
            a[i] = ga * p.d[i];
            v[i] = gv * p.d[i];
        }
    };
    up.diag = detail::zero_diag;
    fam.push_back(up);

    FamilyTerm pu;  // E12^T = c12 grad (gamma_1 - gamma_2)^T
    pu.r0 = 2; pu.c0 = 0; pu.nr = 1; pu.nc = 2; pu.wexp = -1;
    pu.eval = [wc, gc](const PairData& p, cd* a, cd* v) {
        const cd gv = wc.c12 * gval(p, gc);
        const cd ga = wc.c12 * g_logc(p, gc);
        for (int i = 0; i < 2; ++i) {
            a[i] = ga * p.d[i];
            v[i] = gv * p.d[i];
        }
    };
    pu.diag = detail::zero_diag;
    fam.push_back(pu);

    FamilyTerm pp;
    pp.r0 = 2; pp.c0 = 2; pp.nr = 1; pp.nc = 1; pp.wexp = -1;
    pp.eval = [wc](const PairData& p, cd* a, cd* v) {
        a[0] = s_logc(p, wc.e22c);
        v[0] = sval(p, wc.e22c);
    };
    pp.diag = [wc](const NodeGeom& g, cd* a, cd* b) {
        a[0] = s_diag_logc(wc.e22c);
        b[0] = s_diag_reg(wc, wc.e22c, g.jac);
    };
    fam.push_back(pp);
    return fam;
}

namespace detail {

// elastic-elastic block shared by the second- and fourth-kind families
inline void push_uu_block(std::vector<FamilyTerm>& fam, const WaveCtx& wc) {
    const double mu = wc.med.mu;
    const Coef3 rcv = {cd(0.0), wc.rc.c1, -wc.rc.c2};
    const Coef3 c3c = {cd(-2.0 * mu), cd(2.0 * mu) - wc.rc.c3, wc.rc.c3};

    FamilyTerm t1;
    t1.r0 = 0; t1.c0 = 0; t1.nr = 2; t1.nc = 2; t1.wexp = 1;
    t1.eval = [wc, rcv](const PairData& p, cd* a, cd* v) {
        const Vec2& nx = p.x->nu;
        const Vec2& ny = p.y->nu;
        const double nn = nx[0] * ny[0] + nx[1] * ny[1];
        const cd sv = -wc.rho_om2 * p.p[0].gamma;
        const cd sa = wc.rho_om2 * p.p[0].j0 / (2.0 * M_PI);
        const cd rv = sval(p, rcv);
        const cd ra = s_logc(p, rcv);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double geo =
                    2.0 * nx[i] * ny[j] - ny[i] * nx[j] - (i == j ? nn : 0.0);
                a[2 * i + j] = sa * geo - ra * nx[i] * ny[j];
                v[2 * i + j] = sv * geo - rv * nx[i] * ny[j];
            }
    };
    t1.diag = [wc, rcv](const NodeGeom& g, cd* a, cd* b) {
        const cd sa = wc.rho_om2 / (2.0 * M_PI);
        const cd sb = -wc.rho_om2 * s_diag_one(wc.k[0], g.jac);
        const cd ra = s_diag_logc(rcv);
        const cd rb = s_diag_reg(wc, rcv, g.jac);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double geo = g.nu[i] * g.nu[j] - (i == j ? 1.0 : 0.0);
                a[2 * i + j] = sa * geo - ra * g.nu[i] * g.nu[j];
                b[2 * i + j] = sb * geo - rb * g.nu[i] * g.nu[j];
            }
    };
    fam.push_back(t1);

    FamilyTerm t2;
    t2.r0 = 0; t2.c0 = 0; t2.nr = 2; t2.nc = 2; t2.wexp = -1;
    t2.left_ds = true; t2.right_dsw = true;
    t2.eval = [wc, mu](const PairData& p, cd* a, cd* v) {
        e11_eval(wc, p, a, v);
        rot_conj(a);
        rot_conj(v);
        const cd sv = 4.0 * mu * p.p[0].gamma;
        const cd sa = -4.0 * mu * p.p[0].j0 / (2.0 * M_PI);
        for (int i = 0; i < 4; ++i) {
            a[i] *= 4.0 * mu * mu;
            v[i] *= 4.0 * mu * mu;
        }
        a[0] += sa; a[3] += sa;
        v[0] += sv; v[3] += sv;
    };
    t2.diag = [wc, mu](const NodeGeom& g, cd* a, cd* b) {
        e11_diag(wc, g, a, b);
        rot_conj(a);
        rot_conj(b);
        const cd sa = -4.0 * mu / (2.0 * M_PI);
        const cd sb = 4.0 * mu * s_diag_one(wc.k[0], g.jac);
        for (int i = 0; i < 4; ++i) {
            a[i] *= 4.0 * mu * mu;
            b[i] *= 4.0 * mu * mu;
        }
        a[0] += sa; a[3] += sa;
        b[0] += sb; b[3] += sb;
    };
    fam.push_back(t2);

    FamilyTerm t3;
    t3.r0 = 0; t3.c0 = 0; t3.nr = 2; t3.nc = 2; t3.wexp = -1;
    t3.right_dsw = true;
    t3.eval = [wc, c3c](const PairData& p, cd* a, cd* v) {
        const cd gv = gval(p, c3c);
        const cd ga = g_logc(p, c3c);
        const Vec2& nx = p.x->nu;
        const double dp[2] = {p.d[1], -p.d[0]};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                a[2 * i + j] = ga * nx[i] * dp[j];
                v[2 * i + j] = gv * nx[i] * dp[j];
            }
    };
    t3.diag = zero_diag;
    fam.push_back(t3);

    FamilyTerm t4;
    t4.r0 = 0; t4.c0 = 0; t4.nr = 2; t4.nc = 2; t4.wexp = 1;
    t4.left_ds = true;
    t4.eval = [wc, c3c](const PairData& p, cd* a, cd* v) {
        const cd gv = -gval(p, c3c);
        const cd ga = -g_logc(p, c3c);
        const Vec2& ny = p.y->nu;
        const double ad[2] = {-p.d[1], p.d[0]};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                a[2 * i + j] = ga * ad[i] * ny[j];
                v[2 * i + j] = gv * ad[i] * ny[j];
            }
    };
    t4.diag = zero_diag;
    fam.push_back(t4);
}

// pressure-pressure block shared by the second- and third-kind families
inline void push_pp_block(std::vector<FamilyTerm>& fam, const WaveCtx& wc) {
    const cd kp2 = cd(wc.wn.kp * wc.wn.kp, 0.0);
    const Coef3 zc = {cd(0.0), wc.wn.k1sq() * (kp2 - wc.wn.k1sq()),
                      -wc.wn.k2sq() * (kp2 - wc.wn.k2sq())};

    FamilyTerm z1;
    z1.r0 = 2; z1.c0 = 2; z1.nr = 1; z1.nc = 1; z1.wexp = 1;
    z1.eval = [wc, zc](const PairData& p, cd* a, cd* v) {
        const double nn =
            p.x->nu[0] * p.y->nu[0] + p.x->nu[1] * p.y->nu[1];
        a[0] = -s_logc(p, zc) * nn / wc.d12;
        v[0] = -sval(p, zc) * nn / wc.d12;
    };
    z1.diag = [wc, zc](const NodeGeom& g, cd* a, cd* b) {
        a[0] = -s_diag_logc(zc) / wc.d12;
        b[0] = -s_diag_reg(wc, zc, g.jac) / wc.d12;
    };
    fam.push_back(z1);

    FamilyTerm z2;
    z2.r0 = 2; z2.c0 = 2; z2.nr = 1; z2.nc = 1; z2.wexp = -1;
    z2.left_ds = true; z2.right_dsw = true;
    z2.eval = [wc](const PairData& p, cd* a, cd* v) {
        a[0] = s_logc(p, wc.e22c);
        v[0] = sval(p, wc.e22c);
    };
    z2.diag = [wc](const NodeGeom& g, cd* a, cd* b) {
        a[0] = s_diag_logc(wc.e22c);
        b[0] = s_diag_reg(wc, wc.e22c, g.jac);
    };
    fam.push_back(z2);
}

}  // namespace detail

// Regularized family for the composite operators of the second, third and
// fourth kind (`which` selects the operator).
inline std::vector<FamilyTerm> regularized_family(const WaveCtx& wc, int which) {
    if (which < 2 || which > 4) throw std::invalid_argument("family index must be 2, 3 or 4");
    const Coef3 gc = {cd(0.0), cd(1.0), cd(-1.0)};
    const Coef3 sk2 = {cd(0.0), wc.wn.k1sq(), -wc.wn.k2sq()};
    const Coef3 pc = {cd(0.0), -wc.wn.k1sq(), wc.wn.k2sq()};
    const cd kp2 = cd(wc.wn.kp * wc.wn.kp, 0.0);
    const double mu = wc.med.mu;
    const double gam = wc.med.gamma;
    const cd cpl = wc.i_om_eta;  // i omega eta
    const cd dl = wc.d12 * wc.lp2m;
    std::vector<FamilyTerm> fam;

    if (which == 3) {
        FamilyTerm uu;  // plain elastic block of the single layer
        uu.r0 = 0; uu.c0 = 0; uu.nr = 2; uu.nc = 2; uu.wexp = -1;
        uu.eval = [wc](const PairData& p, cd* a, cd* v) { e11_eval(wc, p, a, v); };
        uu.diag = [wc](const NodeGeom& g, cd* a, cd* b) { e11_diag(wc, g, a, b); };
        fam.push_back(uu);

        FamilyTerm p1;
        p1.r0 = 0; p1.c0 = 2; p1.nr = 2; p1.nc = 1; p1.wexp = 1;
        p1.eval = [wc, pc, gam, dl](const PairData& p, cd* a, cd* v) {
            const cd cs = gam / dl;
            for (int i = 0; i < 2; ++i) {
                a[i] = cs * s_logc(p, pc) * p.y->nu[i];
                v[i] = cs * sval(p, pc) * p.y->nu[i];
            }
        };
        p1.diag = [wc, pc, gam, dl](const NodeGeom& g, cd* a, cd* b) {
            const cd cs = gam / dl;
            for (int i = 0; i < 2; ++i) {
                a[i] = cs * s_diag_logc(pc) * g.nu[i];
                b[i] = cs * s_diag_reg(wc, pc, g.jac) * g.nu[i];
            }
        };
        fam.push_back(p1);

        FamilyTerm p2;
        p2.r0 = 0; p2.c0 = 2; p2.nr = 2; p2.nc = 1; p2.wexp = -1;
        p2.right_dsw = true;
        p2.eval = [wc, gc, gam, dl](const PairData& p, cd* a, cd* v) {
            const cd cs = gam / dl;
            const double ad[2] = {-p.d[1], p.d[0]};
            for (int i = 0; i < 2; ++i) {
                a[i] = cs * g_logc(p, gc) * ad[i];
                v[i] = cs * gval(p, gc) * ad[i];
            }
        };
        p2.diag = detail::zero_diag;
        fam.push_back(p2);

        FamilyTerm q1;
        q1.r0 = 2; q1.c0 = 0; q1.nr = 1; q1.nc = 2; q1.wexp = -1;
        q1.eval = [wc, pc, cpl, dl](const PairData& p, cd* a, cd* v) {
            const cd cs = cpl / dl;
            for (int j = 0; j < 2; ++j) {
                a[j] = cs * s_logc(p, pc) * p.x->nu[j];
                v[j] = cs * sval(p, pc) * p.x->nu[j];
            }
        };
        q1.diag = [wc, pc, cpl, dl](const NodeGeom& g, cd* a, cd* b) {
            const cd cs = cpl / dl;
            for (int j = 0; j < 2; ++j) {
                a[j] = cs * s_diag_logc(pc) * g.nu[j];
                b[j] = cs * s_diag_reg(wc, pc, g.jac) * g.nu[j];
            }
        };
        fam.push_back(q1);

        FamilyTerm q2;
        q2.r0 = 2; q2.c0 = 0; q2.nr = 1; q2.nc = 2; q2.wexp = -1;
        q2.left_ds = true;
        q2.eval = [wc, gc, cpl, dl](const PairData& p, cd* a, cd* v) {
            const cd cs = -cpl / dl;
            const double dp[2] = {p.d[1], -p.d[0]};
            for (int j = 0; j < 2; ++j) {
                a[j] = cs * g_logc(p, gc) * dp[j];
                v[j] = cs * gval(p, gc) * dp[j];
            }
        };
        q2.diag = detail::zero_diag;
        fam.push_back(q2);

        detail::push_pp_block(fam, wc);
        return fam;
    }

    detail::push_uu_block(fam, wc);

    if (which == 4) {
        FamilyTerm t5;
        t5.r0 = 0; t5.c0 = 2; t5.nr = 2; t5.nc = 1; t5.wexp = -1;
        t5.eval = [wc, gc, gam, kp2](const PairData& p, cd* a, cd* v) {
            const cd cs = -gam * kp2 / wc.d12;
            for (int i = 0; i < 2; ++i) {
                a[i] = cs * s_logc(p, gc) * p.x->nu[i];
                v[i] = cs * sval(p, gc) * p.x->nu[i];
            }
        };
        t5.diag = [wc, gc, gam, kp2](const NodeGeom& g, cd* a, cd* b) {
            const cd cs = -gam * kp2 / wc.d12;
            for (int i = 0; i < 2; ++i) {
                a[i] = cs * s_diag_logc(gc) * g.nu[i];
                b[i] = cs * s_diag_reg(wc, gc, g.jac) * g.nu[i];
            }
        };
        fam.push_back(t5);

        FamilyTerm t6;
        t6.r0 = 0; t6.c0 = 2; t6.nr = 2; t6.nc = 1; t6.wexp = -1;
        t6.left_ds = true;
        t6.eval = [wc, gc, gam, mu, dl](const PairData& p, cd* a, cd* v) {
            const cd cs = 2.0 * mu * gam / dl;
            const double ad[2] = {-p.d[1], p.d[0]};
            for (int i = 0; i < 2; ++i) {
                a[i] = cs * g_logc(p, gc) * ad[i];
                v[i] = cs * gval(p, gc) * ad[i];
            }
        };
        t6.diag = detail::zero_diag;
        fam.push_back(t6);

        FamilyTerm t7;
        t7.r0 = 2; t7.c0 = 0; t7.nr = 1; t7.nc = 2; t7.wexp = 1;
        t7.eval = [wc, gc, cpl, kp2](const PairData& p, cd* a, cd* v) {
            const cd cs = -cpl * kp2 / wc.d12;
            for (int j = 0; j < 2; ++j) {
                a[j] = cs * s_logc(p, gc) * p.y->nu[j];
                v[j] = cs * sval(p, gc) * p.y->nu[j];
            }
        };
        t7.diag = [wc, gc, cpl, kp2](const NodeGeom& g, cd* a, cd* b) {
            const cd cs = -cpl * kp2 / wc.d12;
            for (int j = 0; j < 2; ++j) {
                a[j] = cs * s_diag_logc(gc) * g.nu[j];
                b[j] = cs * s_diag_reg(wc, gc, g.jac) * g.nu[j];
            }
        };
        fam.push_back(t7);

        FamilyTerm t8;
        t8.r0 = 2; t8.c0 = 0; t8.nr = 1; t8.nc = 2; t8.wexp = -1;
        t8.right_dsw = true;
        t8.eval = [wc, gc, cpl, mu, dl](const PairData& p, cd* a, cd* v) {
            const cd cs = -2.0 * cpl * mu / dl;
            const double dp[2] = {p.d[1], -p.d[0]};
            for (int j = 0; j < 2; ++j) {
                a[j] = cs * g_logc(p, gc) * dp[j];
                v[j] = cs * gval(p, gc) * dp[j];
            }
        };
        t8.diag = detail::zero_diag;
        fam.push_back(t8);

        FamilyTerm t9;
        t9.r0 = 2; t9.c0 = 2; t9.nr = 1; t9.nc = 1; t9.wexp = -1;
        t9.eval = [wc](const PairData& p, cd* a, cd* v) {
            a[0] = s_logc(p, wc.e22c);
            v[0] = sval(p, wc.e22c);
        };
        t9.diag = [wc](const NodeGeom& g, cd* a, cd* b) {
            a[0] = s_diag_logc(wc.e22c);
            b[0] = s_diag_reg(wc, wc.e22c, g.jac);
        };
        fam.push_back(t9);
        return fam;
    }

    // which == 2
    FamilyTerm u1;
    u1.r0 = 0; u1.c0 = 2; u1.nr = 2; u1.nc = 1; u1.wexp = 1;
    u1.eval = [wc, gc, gam, kp2](const PairData& p, cd* a, cd* v) {
        const cd cs = -gam * kp2 / wc.d12;
        const double dn = p.d[0] * p.y->nu[0] + p.d[1] * p.y->nu[1];
        for (int i = 0; i < 2; ++i) {
            a[i] = cs * g_logc(p, gc) * dn * p.x->nu[i];
            v[i] = cs * gval(p, gc) * dn * p.x->nu[i];
        }
    };
    u1.diag = detail::zero_diag;
    fam.push_back(u1);

    FamilyTerm u2;
    u2.r0 = 0; u2.c0 = 2; u2.nr = 2; u2.nc = 1; u2.wexp = -1;
    u2.left_ds = true; u2.right_dsw = true;
    u2.eval = [wc, gc, gam, mu, dl](const PairData& p, cd* a, cd* v) {
        const cd cs = -2.0 * mu * gam / dl;
        for (int i = 0; i < 2; ++i) {
            a[i] = cs * g_logc(p, gc) * p.d[i];
            v[i] = cs * gval(p, gc) * p.d[i];
        }
    };
    u2.diag = detail::zero_diag;
    fam.push_back(u2);

    FamilyTerm u3;
    u3.r0 = 0; u3.c0 = 2; u3.nr = 2; u3.nc = 1; u3.wexp = 1;
    u3.left_ds = true;
    u3.eval = [wc, sk2, gam, mu, dl](const PairData& p, cd* a, cd* v) {
        const cd cs = -2.0 * mu * gam / dl;
        const double an[2] = {-p.y->nu[1], p.y->nu[0]};
        for (int i = 0; i < 2; ++i) {
            a[i] = cs * s_logc(p, sk2) * an[i];
            v[i] = cs * sval(p, sk2) * an[i];
        }
    };
    u3.diag = [wc, sk2, gam, mu, dl](const NodeGeom& g, cd* a, cd* b) {
        const cd cs = -2.0 * mu * gam / dl;
        const double an[2] = {-g.nu[1], g.nu[0]};
        for (int i = 0; i < 2; ++i) {
            a[i] = cs * s_diag_logc(sk2) * an[i];
            b[i] = cs * s_diag_reg(wc, sk2, g.jac) * an[i];
        }
    };
    fam.push_back(u3);

    FamilyTerm w1;
    w1.r0 = 2; w1.c0 = 0; w1.nr = 1; w1.nc = 2; w1.wexp = 1;
    w1.eval = [wc, gc, cpl, kp2](const PairData& p, cd* a, cd* v) {
        const cd cs = cpl * kp2 / wc.d12;
        const double dn = p.d[0] * p.x->nu[0] + p.d[1] * p.x->nu[1];
        for (int j = 0; j < 2; ++j) {
            a[j] = cs * g_logc(p, gc) * dn * p.y->nu[j];
            v[j] = cs * gval(p, gc) * dn * p.y->nu[j];
        }
    };
    w1.diag = detail::zero_diag;
    fam.push_back(w1);

    FamilyTerm w2;
    w2.r0 = 2; w2.c0 = 0; w2.nr = 1; w2.nc = 2; w2.wexp = -1;
    w2.left_ds = true; w2.right_dsw = true;
    w2.eval = [wc, gc, cpl, mu, dl](const PairData& p, cd* a, cd* v) {
        const cd cs = 2.0 * cpl * mu / dl;
        for (int j = 0; j < 2; ++j) {
            a[j] = cs * g_logc(p, gc) * p.d[j];
            v[j] = cs * gval(p, gc) * p.d[j];
        }
    };
    w2.diag = detail::zero_diag;
    fam.push_back(w2);

    FamilyTerm w3;
    w3.r0 = 2; w3.c0 = 0; w3.nr = 1; w3.nc = 2; w3.wexp = -1;
    w3.right_dsw = true;
    w3.eval = [wc, sk2, cpl, mu, dl](const PairData& p, cd* a, cd* v) {
        const cd cs = -2.0 * cpl * mu / dl;
        const double an[2] = {p.x->nu[1], -p.x->nu[0]};
        for (int j = 0; j < 2; ++j) {
            a[j] = cs * s_logc(p, sk2) * an[j];
            v[j] = cs * sval(p, sk2) * an[j];
        }
    };
    w3.diag = [wc, sk2, cpl, mu, dl](const NodeGeom& g, cd* a, cd* b) {
        const cd cs = -2.0 * cpl * mu / dl;
        const double an[2] = {g.nu[1], -g.nu[0]};
        for (int j = 0; j < 2; ++j) {
            a[j] = cs * s_diag_logc(sk2) * an[j];
            b[j] = cs * s_diag_reg(wc, sk2, g.jac) * an[j];
        }
    };
    fam.push_back(w3);

    detail::push_pp_block(fam, wc);
    return fam;
}

}  // namespace arcscat::kernels
