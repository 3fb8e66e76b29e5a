#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "quadrature.hpp"

namespace arcscat::operators {

using cd = std::complex<double>;

// Dense Nystrom discretization of one boundary operator. Component-major
// layout: rows/cols ordered u1-block, u2-block, p-block, each of size n.
struct DiscreteOperator {
    int n = 0;
    std::string tag;
    std::vector<double> angles;  // grid the matrix lives on
    MatrixXcd m;
};

namespace detail {

inline kernels::PairData flip_pair(const kernels::PairData& p) {
    kernels::PairData q = p;
    std::swap(q.x, q.y);
    q.d = {-p.d[0], -p.d[1]};
    q.du = {-p.du[0], -p.du[1]};
    return q;
}

}  // namespace detail

// Assembles sum of family terms: each term contributes
// [S]_ij = (pi/N) J_j sin^{1+a}(theta_j) (logc_ij R_ij + reg_ij),
// reg_ij = val_ij - logc_ij log|t_i - t_j| off the diagonal, the coded
// coincidence limit on it; then optional D_s (left) / D_s^w (right) wraps.
inline DiscreteOperator assemble_family(const kernels::WaveCtx& wc,
                                        const ArcParametrization& arc, const ChebyshevGrid& grid,
                                        const std::vector<kernels::FamilyTerm>& fam,
                                        std::string tag) {
    const int n = grid.n;
    std::vector<kernels::NodeGeom> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = kernels::node_geom(arc, grid.angles[i]);
    const LogWeights lw = log_weights(n);
    const DiffOps ops = tangential_derivative_ops(arc, grid);

    // quadrature factors per column for both weight exponents
    std::vector<double> qf_m1(n), qf_p1(n);
    for (int j = 0; j < n; ++j) {
        const double s = std::sin(grid.angles[j]);
        qf_m1[j] = (M_PI / n) * nodes[j].jac;
        qf_p1[j] = qf_m1[j] * s * s;
    }

    std::vector<MatrixXcd> tm(fam.size());
    for (std::size_t tix = 0; tix < fam.size(); ++tix)
        tm[tix] = MatrixXcd::Zero(fam[tix].nr * n, fam[tix].nc * n);

    auto scatter = [&](std::size_t tix, int i, int j, const cd* logc, const cd* reg,
                       double rij) {
        const kernels::FamilyTerm& t = fam[tix];
        const double qf = (t.wexp == 1 ? qf_p1[j] : qf_m1[j]);
        for (int bi = 0; bi < t.nr; ++bi)
            for (int bj = 0; bj < t.nc; ++bj) {
                const int k = bi * t.nc + bj;
                tm[tix](bi * n + i, bj * n + j) += qf * (logc[k] * rij + reg[k]);
            }
    };

    cd logc[4], val[4], reg[4];
    for (int j = 0; j < n; ++j) {
        for (std::size_t tix = 0; tix < fam.size(); ++tix) {
            fam[tix].diag(nodes[j], logc, reg);
            scatter(tix, j, j, logc, reg, lw.r(j, j));
        }
        for (int i = j + 1; i < n; ++i) {
            const kernels::PairData pij = kernels::make_pair(wc, nodes[i], nodes[j]);
            const kernels::PairData pji = detail::flip_pair(pij);
            const double lt = std::log(std::abs(nodes[i].t - nodes[j].t));
            for (std::size_t tix = 0; tix < fam.size(); ++tix) {
                const int cnt = fam[tix].nr * fam[tix].nc;
                fam[tix].eval(pij, logc, val);
                for (int k = 0; k < cnt; ++k) reg[k] = val[k] - logc[k] * lt;
                scatter(tix, i, j, logc, reg, lw.r(i, j));
                fam[tix].eval(pji, logc, val);
                for (int k = 0; k < cnt; ++k) reg[k] = val[k] - logc[k] * lt;
                scatter(tix, j, i, logc, reg, lw.r(j, i));
            }
        }
    }

    DiscreteOperator op;
    op.n = n;
    op.tag = std::move(tag);
    op.angles = grid.angles;
    op.m = MatrixXcd::Zero(3 * n, 3 * n);
    const MatrixXcd dsc = ops.ds.cast<cd>();
    const MatrixXcd dswc = ops.dsw.cast<cd>();
    for (std::size_t tix = 0; tix < fam.size(); ++tix) {
        const kernels::FamilyTerm& t = fam[tix];
        for (int bi = 0; bi < t.nr; ++bi)
            for (int bj = 0; bj < t.nc; ++bj) {
                MatrixXcd blk = tm[tix].block(bi * n, bj * n, n, n);
                if (t.left_ds) blk = dsc * blk;
                if (t.right_dsw) blk = blk * dswc;
                op.m.block((t.r0 + bi) * n, (t.c0 + bj) * n, n, n) += blk;
            }
        tm[tix].resize(0, 0);
    }
    return op;
}

// Weighted single-layer operator (first kind).
inline DiscreteOperator assemble_single_layer(const kernels::WaveCtx& wc,
                                              const ArcParametrization& arc,
                                              const ChebyshevGrid& grid) {
    return assemble_family(wc, arc, grid, kernels::single_layer_family(wc), "V1w");
}

// Regularized composite operator of the given kind (2, 3 or 4).
inline DiscreteOperator assemble_regularized(const kernels::WaveCtx& wc,
                                             const ArcParametrization& arc,
                                             const ChebyshevGrid& grid, int which) {
    return assemble_family(wc, arc, grid, kernels::regularized_family(wc, which),
                           "V" + std::to_string(which) + "w");
}

inline DiscreteOperator identity_operator(const ChebyshevGrid& grid) {
    DiscreteOperator op;
    op.n = grid.n;
    op.tag = "I";
    op.angles = grid.angles;
    op.m = MatrixXcd::Identity(3 * grid.n, 3 * grid.n);
    return op;
}

inline DiscreteOperator compose(const DiscreteOperator& a, const DiscreteOperator& b) {
    if (a.n != b.n) throw std::invalid_argument("compose: grid size mismatch");
    for (int i = 0; i < a.n; ++i)
        if (a.angles[i] != b.angles[i]) throw std::invalid_argument("compose: grid mismatch");
    DiscreteOperator op;
    op.n = a.n;
    op.tag = a.tag + "*" + b.tag;
    op.angles = a.angles;
    op.m = a.m * b.m;
    return op;
}

// Debug dump: magic "ARCS", u32 grid size, u8 tag code, then row-major
// (re, im) pairs of 64-bit little-endian floats.
inline void dump_binary(const std::string& path, const DiscreteOperator& op, std::uint8_t tag_code) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open dump file: " + path);
    f.write("ARCS", 4);
    const std::uint32_t n = static_cast<std::uint32_t>(op.n);
    f.write(reinterpret_cast<const char*>(&n), 4);
    f.write(reinterpret_cast<const char*>(&tag_code), 1);
    for (int i = 0; i < op.m.rows(); ++i)
        for (int j = 0; j < op.m.cols(); ++j) {
            const double re = op.m(i, j).real(), im = op.m(i, j).imag();
            f.write(reinterpret_cast<const char*>(&re), 8);
            f.write(reinterpret_cast<const char*>(&im), 8);
        }
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace arcscat::operators
