#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "operators.hpp"

namespace arcscat::bvp {

using cd = std::complex<double>;

// Plane incident shear wave with direction angle theta_inc; the pressure
// part of the incident field is identically zero.
struct IncidentField {
    double theta_inc = 0.0;
    double ks = 0.0;
    double mu = 0.0;
    Vec2 d{};      // propagation direction
    Vec2 dperp{};  // polarization, d rotated by +pi/2

    IncidentField(const MediumParams& m, double theta) : theta_inc(theta) {
        const WaveNumbers wn = compute_wavenumbers(m);
        ks = wn.ks;
        mu = m.mu;
        d = {std::cos(theta), std::sin(theta)};
        dperp = {-std::sin(theta), std::cos(theta)};
    }

    cd phase(const Vec2& x) const {
        return std::exp(cd(0.0, ks * (x[0] * d[0] + x[1] * d[1])));
    }

    std::array<cd, 2> displacement(const Vec2& x) const {
        const cd e = phase(x);
        return {dperp[0] * e, dperp[1] * e};
    }

    // T u_inc = i mu ks e^{i ks x.d} [(d.nu) dperp + (dperp.nu) d]
    std::array<cd, 2> traction(const Vec2& x, const Vec2& nu) const {
        const cd c = cd(0.0, mu * ks) * phase(x);
        const double dn = d[0] * nu[0] + d[1] * nu[1];
        const double pn = dperp[0] * nu[0] + dperp[1] * nu[1];
        return {c * (dn * dperp[0] + pn * d[0]), c * (dn * dperp[1] + pn * d[1])};
    }
};

// Right-hand sides G_1..G_4 in component-major layout (u1 | u2 | p).
inline VectorXcd boundary_data(int bc_kind, const IncidentField& inc,
                               const ArcParametrization& arc, const ChebyshevGrid& grid) {
    if (bc_kind < 1 || bc_kind > 4) throw std::invalid_argument("bc_kind must be 1..4");
    const int n = grid.n;
    VectorXcd g = VectorXcd::Zero(3 * n);
    for (int j = 0; j < n; ++j) {
        const double t = grid.nodes[j];
        const Vec2 x = arc.position(t);
        if (bc_kind == 1 || bc_kind == 3) {
            const auto u = inc.displacement(x);
            g[j] = -u[0];
            g[n + j] = -u[1];
        } else {
            const auto tr = inc.traction(x, arc.normal(t));
            g[j] = -tr[0];
            g[n + j] = -tr[1];
        }
    }
    return g;
}

struct SolveReport {
    int n_iterations = 0;
    std::vector<double> residual_history;
    double t_precompute = 0.0;
    double t_iterations = 0.0;
    bool converged = false;
    bool stagnated = false;
};

// Full (unrestarted) GMRES with Givens rotations; relative-residual stop,
// stagnation flag when 20 consecutive iterations improve by less than 1e-14.
inline VectorXcd gmres(const std::function<VectorXcd(const VectorXcd&)>& action,
                       const VectorXcd& rhs, double tol, int max_it, SolveReport& rep) {
    if (!(tol > 0.0)) throw std::invalid_argument("gmres: tol must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const int n = static_cast<int>(rhs.size());
    const double bnorm = rhs.norm();
    rep.residual_history.clear();
    rep.n_iterations = 0;
    rep.converged = false;
    rep.stagnated = false;
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.residual_history.push_back(0.0);
        return VectorXcd::Zero(n);
    }
    max_it = std::min(max_it, n);
    std::vector<VectorXcd> q;
    q.push_back(rhs / bnorm);
    MatrixXcd h = MatrixXcd::Zero(max_it + 1, max_it);
    std::vector<double> cs(max_it);  // Givens: real cosine, complex sine
    std::vector<cd> sn(max_it);
    VectorXcd beta = VectorXcd::Zero(max_it + 1);
    beta[0] = bnorm;
    int k = 0;
    for (; k < max_it; ++k) {
        VectorXcd w = action(q[k]);
        if (!w.allFinite()) throw std::runtime_error("gmres: non-finite values encountered");
        for (int i = 0; i <= k; ++i) {
            h(i, k) = q[i].dot(w);
            w -= h(i, k) * q[i];
        }
        h(k + 1, k) = w.norm();
        if (std::abs(h(k + 1, k)) > 0.0) q.push_back(w / h(k + 1, k));
        else q.push_back(VectorXcd::Zero(n));
        for (int i = 0; i < k; ++i) {
            const cd t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
            h(i + 1, k) = -std::conj(sn[i]) * h(i, k) + cs[i] * h(i + 1, k);
            h(i, k) = t;
        }
        const cd h1 = h(k, k), h2 = h(k + 1, k);
        const double denom = std::hypot(std::abs(h1), std::abs(h2));
        if (denom == 0.0) {
            cs[k] = 1.0;
            sn[k] = 0.0;
        } else if (std::abs(h1) == 0.0) {
            cs[k] = 0.0;
            sn[k] = std::conj(h2) / std::abs(h2);
        } else {
            cs[k] = std::abs(h1) / denom;
            sn[k] = (h1 / std::abs(h1)) * std::conj(h2) / denom;
        }
        h(k, k) = cs[k] * h1 + sn[k] * h2;
        h(k + 1, k) = 0.0;
        beta[k + 1] = -std::conj(sn[k]) * beta[k];
        beta[k] = cs[k] * beta[k];
        const double res = std::abs(beta[k + 1]) / bnorm;
        rep.residual_history.push_back(res);
        rep.n_iterations = k + 1;
        if (res <= tol) {
            rep.converged = true;
            ++k;
            break;
        }
        const int lag = 20;
        if (k + 1 > lag) {
            const double prev = rep.residual_history[k - lag];
            if (prev - res < 1e-14 * prev) {
                rep.stagnated = true;
                ++k;
                break;
            }
        }
    }
    // back substitution
    VectorXcd ysol = VectorXcd::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
        cd s = beta[i];
        for (int j = i + 1; j < k; ++j) s -= h(i, j) * ysol[j];
        ysol[i] = s / h(i, i);
    }
    VectorXcd x = VectorXcd::Zero(n);
    for (int i = 0; i < k; ++i) x += ysol[i] * q[i];
    rep.t_iterations = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return x;
}

struct Density {
    VectorXcd values;
    int bc_kind = 1;
    bool regularized = false;
};

// Solve with caller-supplied operator matrices. For the regularized
// variants `left` is the regularizer (V2w or V4w) and `right` the equation
// operator (V1w or V3w); for direct solves only `right` is used.
inline Density solve_with_operators(int bc_kind, bool regularized,
                                    const operators::DiscreteOperator* left,
                                    const operators::DiscreteOperator& right,
                                    const VectorXcd& rhs, double tol, SolveReport& rep) {
    std::function<VectorXcd(const VectorXcd&)> action;
    VectorXcd b = rhs;
    if (!regularized) {
        action = [&right](const VectorXcd& v) { return VectorXcd(right.m * v); };
    } else {
        if (left == nullptr) throw std::invalid_argument("regularized solve needs both operators");
        action = [left, &right](const VectorXcd& v) { return VectorXcd(left->m * (right.m * v)); };
        if (bc_kind == 1 || bc_kind == 3) b = left->m * rhs;
    }
    Density den;
    den.bc_kind = bc_kind;
    den.regularized = regularized;
    den.values = gmres(action, b, tol, static_cast<int>(rhs.size()), rep);
    return den;
}

// Assembles what the chosen variant needs and solves the BIE of Table 1.
inline Density solve_bvp(int bc_kind, bool regularized, const MediumParams& m,
                         const ArcParametrization& arc, const ChebyshevGrid& grid,
                         const IncidentField& inc, double tol, SolveReport& rep) {
    if (bc_kind < 1 || bc_kind > 4) throw std::invalid_argument("bc_kind must be 1..4");
    const auto t0 = std::chrono::steady_clock::now();
    const kernels::WaveCtx wc = kernels::make_wave_ctx(m);
    const VectorXcd g = boundary_data(bc_kind, inc, arc, grid);
    operators::DiscreteOperator right, left;
    const bool second_pair = bc_kind >= 3;  // kinds 3,4 use the V3w/V4w pair
    if (!regularized) {
        switch (bc_kind) {
            case 1: right = operators::assemble_single_layer(wc, arc, grid); break;
            case 2: right = operators::assemble_regularized(wc, arc, grid, 2); break;
            case 3: right = operators::assemble_regularized(wc, arc, grid, 3); break;
            case 4: right = operators::assemble_regularized(wc, arc, grid, 4); break;
        }
        rep.t_precompute =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return solve_with_operators(bc_kind, false, nullptr, right, g, tol, rep);
    }
    if (!second_pair) {
        right = operators::assemble_single_layer(wc, arc, grid);
        left = operators::assemble_regularized(wc, arc, grid, 2);
    } else {
        right = operators::assemble_regularized(wc, arc, grid, 3);
        left = operators::assemble_regularized(wc, arc, grid, 4);
    }
    rep.t_precompute =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return solve_with_operators(bc_kind, true, &left, right, g, tol, rep);
}

namespace detail {

// 3x3 potential kernel M_i(x, y) of the Table-1 representation S_i^w
inline void representation_kernel(const kernels::WaveCtx& wc, int bc_kind, const Vec2& x,
                                  const kernels::NodeGeom& y, cd m[3][3]) {
    if (bc_kind == 1) {
        const auto e = kernels::eval_fundamental(wc, x, y.x);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m[a][b] = e[b][a];
        return;
    }
    const kernels::TractionOfE tr = kernels::traction_y_fundamental(wc, x, y.x, y.nu);
    cd g[3][3];
    for (int n = 0; n < 3; ++n) {
        if (bc_kind == 2 || bc_kind == 4) {
            for (int a = 0; a < 2; ++a)
                g[a][n] = tr.tu[a][n] - wc.i_om_eta * y.nu[a] * tr.e[2][n];
        } else {  // bc_kind == 3
            for (int a = 0; a < 2; ++a) g[a][n] = tr.e[a][n];
        }
        g[2][n] = bc_kind == 4 ? -tr.e[2][n] : tr.dp[n];
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m[a][b] = g[b][a];
}

// per-component weight exponents of W_1..W_4
inline void weight_exponents(int bc_kind, int a[3]) {
    switch (bc_kind) {
        case 1: a[0] = a[1] = a[2] = -1; break;
        case 2: a[0] = a[1] = a[2] = 1; break;
        case 3: a[0] = a[1] = -1; a[2] = 1; break;
        default: a[0] = a[1] = 1; a[2] = -1; break;
    }
}

}  // namespace detail

// Weighted potential of Table 1 applied to the final representation
// density (for regularized kinds 2 and 4 pass `pre` = discrete V1w/V3w so
// the density gets mapped first). Trapezoid rule in theta.
inline std::vector<std::array<cd, 3>> near_field(const kernels::WaveCtx& wc,
                                                 const ArcParametrization& arc,
                                                 const ChebyshevGrid& grid, int bc_kind,
                                                 bool regularized, const VectorXcd& density,
                                                 const std::vector<Vec2>& points,
                                                 const operators::DiscreteOperator* pre = nullptr) {
    if (bc_kind < 1 || bc_kind > 4) throw std::invalid_argument("bc_kind must be 1..4");
    const int n = grid.n;
    if (density.size() != 3 * n) throw std::invalid_argument("near_field: density size mismatch");
    VectorXcd psi = density;
    if (regularized && (bc_kind == 2 || bc_kind == 4)) {
        if (pre == nullptr) {
            operators::DiscreteOperator v =
                bc_kind == 2 ? operators::assemble_single_layer(wc, arc, grid)
                             : operators::assemble_regularized(wc, arc, grid, 3);
            psi = v.m * density;
        } else {
            psi = pre->m * density;
        }
    }
    std::vector<kernels::NodeGeom> nodes(n);
    for (int j = 0; j < n; ++j) nodes[j] = kernels::node_geom(arc, grid.angles[j]);
    int wexp[3];
    detail::weight_exponents(bc_kind, wexp);

    std::vector<std::array<cd, 3>> out(points.size(), {cd(0.0), cd(0.0), cd(0.0)});
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const Vec2& x = points[pi];
        for (int j = 0; j < n; ++j) {
            const double dx = x[0] - nodes[j].x[0], dy = x[1] - nodes[j].x[1];
            if (std::hypot(dx, dy) <= 1e-6)
                throw std::domain_error("near-singular evaluation unsupported");
        }
        cd m[3][3];
        for (int j = 0; j < n; ++j) {
            detail::representation_kernel(wc, bc_kind, x, nodes[j], m);
            const double s = std::sin(grid.angles[j]);
            const double base = (M_PI / n) * nodes[j].jac;
            for (int c = 0; c < 3; ++c) {
                const double qf = base * (wexp[c] == 1 ? s * s : 1.0);
                const cd pv = psi[c * n + j] * qf;
                for (int a = 0; a < 3; ++a) out[pi][a] += m[a][c] * pv;
            }
        }
    }
    return out;
}

// max-norm relative near-field error
inline double near_field_error(const std::vector<std::array<cd, 3>>& candidate,
                               const std::vector<std::array<cd, 3>>& reference) {
    if (candidate.size() != reference.size())
        throw std::invalid_argument("near_field_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
        for (int c = 0; c < 3; ++c) {
            num = std::max(num, std::abs(candidate[i][c] - reference[i][c]));
            den = std::max(den, std::abs(reference[i][c]));
        }
    if (den == 0.0) throw std::invalid_argument("near_field_error: zero reference");
    return num / den;
}

// equispaced sample circle used by the experiments
inline std::vector<Vec2> sample_circle(double radius, int count) {
    std::vector<Vec2> pts(count);
    for (int i = 0; i < count; ++i) {
        const double a = 2.0 * M_PI * i / count;
        pts[i] = {radius * std::cos(a), radius * std::sin(a)};
    }
    return pts;
}

}  // namespace arcscat::bvp
