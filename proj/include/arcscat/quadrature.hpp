#pragma once

// Chebyshev grids in the angular variable, cosine transforms, the spectral
// quadrature for logarithmic kernels, and dense tangential-derivative
// matrices. Densities are even 2*pi-periodic functions of theta.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "arcscat/geometry.hpp"
#include "arcscat/medium.hpp"

namespace arcscat {

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

struct ChebyshevGrid {
    int n = 0;
    std::vector<double> angles;  // theta_j = pi(2j+1)/(2N), increasing in (0,pi)
    std::vector<double> nodes;   // t_j = cos(theta_j), decreasing in (-1,1)

    explicit ChebyshevGrid(int n_points) : n(n_points) {
        if (n < 1) throw std::invalid_argument("ChebyshevGrid: need at least one point");
        angles.resize(n);
        nodes.resize(n);
        for (int j = 0; j < n; ++j) {
            angles[j] = M_PI * (2.0 * j + 1.0) / (2.0 * n);
            nodes[j] = std::cos(angles[j]);
        }
    }

    bool same_as(const ChebyshevGrid& other) const { return n == other.n; }
};

// a_n = ((2 - delta_{0n})/N) sum_j v_j cos(n theta_j)
inline VectorXd cos_coeffs(const ChebyshevGrid& g, const VectorXd& values) {
    if (values.size() != g.n) throw std::invalid_argument("cos_coeffs: grid mismatch");
    VectorXd a(g.n);
    for (int n = 0; n < g.n; ++n) {
        double s = 0.0;
        for (int j = 0; j < g.n; ++j) s += values[j] * std::cos(n * g.angles[j]);
        a[n] = (n == 0 ? 1.0 : 2.0) * s / g.n;
    }
    return a;
}

inline VectorXd cos_synthesis(const ChebyshevGrid& g, const VectorXd& coeffs) {
    if (coeffs.size() != g.n) throw std::invalid_argument("cos_synthesis: grid mismatch");
    VectorXd v = VectorXd::Zero(g.n);
    for (int j = 0; j < g.n; ++j)
        for (int n = 0; n < g.n; ++n) v[j] += coeffs[n] * std::cos(n * g.angles[j]);
    return v;
}

// Quadrature weights for integrating log|cos(theta_i) - cos(theta')| times a
// smooth factor: R[i][j] = R^N(|i-j|) + R^N(i+j+1) with
// R^N(l) = -sum_{m<N} (2-delta_{0m}) lambda_m cos(l m pi / N),
// lambda_0 = log(2)/2, lambda_m = 1/(2m).
struct LogWeights {
    int n = 0;
    std::vector<double> rvec;  // R^N(l), l = 0..2N-1
    MatrixXd r;                // R[i][j]

    explicit LogWeights(int n_points) : n(n_points) {
        if (n < 1) throw std::invalid_argument("LogWeights: need at least one point");
        rvec.resize(2 * n);
        for (int l = 0; l < 2 * n; ++l) {
            double s = 0.5 * std::log(2.0);
            for (int m = 1; m < n; ++m)
                s += std::cos(l * m * M_PI / n) / m;
            rvec[l] = -s;
        }
        r.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = rvec[std::abs(i - j)] + rvec[i + j + 1];
    }
};

inline LogWeights log_weights(int n) { return LogWeights(n); }

// (pi/N) sum_j factor_j density_j R[i][j]
inline cd apply_log_quadrature(const LogWeights& w, const VectorXcd& factor,
                               const VectorXcd& density, int i) {
    if (factor.size() != w.n || density.size() != w.n)
        throw std::invalid_argument("apply_log_quadrature: grid mismatch");
    cd s(0.0, 0.0);
    for (int j = 0; j < w.n; ++j) s += factor[j] * density[j] * w.r(i, j);
    return s * (M_PI / w.n);
}

namespace detail {

// dense spectral d/dtheta on the open cosine grid:
// analysis -> multiply by -n sin(n theta) -> pointwise
inline MatrixXd dtheta_matrix(const ChebyshevGrid& g) {
    const int n = g.n;
    MatrixXd d = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int m = 1; m < n; ++m)
                s += -m * std::sin(m * g.angles[i]) * std::cos(m * g.angles[j]);
            d(i, j) = 2.0 * s / n;
        }
    return d;
}

}  // namespace detail

struct DiffOps {
    MatrixXd ds;   // D_s = -(1/(J sin theta)) d/dtheta
    MatrixXd dsw;  // D_s^w = -(sin theta / J) d/dtheta - diag(cos theta / J)
};

inline DiffOps tangential_derivative_ops(const ArcParametrization& arc, const ChebyshevGrid& g) {
    const MatrixXd dt = detail::dtheta_matrix(g);
    DiffOps ops;
    ops.ds.resize(g.n, g.n);
    ops.dsw.resize(g.n, g.n);
    for (int i = 0; i < g.n; ++i) {
        const double st = std::sin(g.angles[i]);
        const double j = arc.jacobian(g.nodes[i]);
        ops.ds.row(i) = dt.row(i) * (-1.0 / (j * st));
        ops.dsw.row(i) = dt.row(i) * (-st / j);
        ops.dsw(i, i) -= std::cos(g.angles[i]) / j;
    }
    return ops;
}

}  // namespace arcscat
