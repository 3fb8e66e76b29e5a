#pragma once

// Eigenvalue diagnostics for the composite boundary operators, plus a
// coefficient-space oracle for the weighted logarithmic-kernel operators
// acting on Chebyshev polynomials.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <lapacke.h>

#include "operators.hpp"

namespace arcscat::spectrum {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Eigenvalue report and clustering
// ---------------------------------------------------------------------------

struct Cluster {
  cplx center{};       // centroid of the member eigenvalues
  std::size_t count{};  // number of eigenvalues within `radius` of the centroid
};

struct EigenReport {
  std::vector<cplx> eigenvalues;
  std::vector<Cluster> clusters;  // sorted by count, descending
  double min_abs{};               // smallest |eigenvalue| (invertibility witness)
  double cluster_radius{};
};

namespace detail {

// Mode-seeking clustering via flat-kernel mean shift.  Each point is shifted
// to the centroid of its bandwidth-disc until it stabilizes; points that
// stabilize at the same mode form one cluster (its basin).  The bandwidth is
// taken smaller than the reporting radius so that nearby accumulation points
// (closer than the radius but farther than the bandwidth) remain separate
// clusters instead of merging into one disc.
inline std::vector<Cluster> find_clusters(const std::vector<cplx>& pts, double radius) {
  const double bw = radius / 4.0;
  std::vector<cplx> modes;
  std::vector<std::size_t> weight;
  for (const auto& p : pts) {
    cplx c = p;
    for (int it = 0; it < 500; ++it) {
      cplx sum = 0.0;
      std::size_t n = 0;
      for (const auto& q : pts)
        if (std::abs(q - c) <= bw) {
          sum += q;
          ++n;
        }
      const cplx next = n ? sum / static_cast<double>(n) : c;
      if (std::abs(next - c) < 1e-13) {
        c = next;
        break;
      }
      c = next;
    }
    bool merged = false;
    for (std::size_t m = 0; m < modes.size(); ++m)
      if (std::abs(modes[m] - c) <= bw / 4.0) {
        // running centroid of the basin members' limits
        modes[m] = (modes[m] * static_cast<double>(weight[m]) + c) /
                   static_cast<double>(weight[m] + 1);
        ++weight[m];
        merged = true;
        break;
      }
    if (!merged) {
      modes.push_back(c);
      weight.push_back(1);
    }
  }
  std::vector<Cluster> out;
  out.reserve(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) out.push_back(Cluster{modes[m], weight[m]});
  std::sort(out.begin(), out.end(),
            [](const Cluster& a, const Cluster& b) { return a.count > b.count; });
  return out;
}

// Number of spectrum points inside the radius-`r` disc around `center`.
inline std::size_t disc_count(const std::vector<cplx>& pts, cplx center, double r) {
  std::size_t c = 0;
  for (const auto& q : pts)
    if (std::abs(q - center) <= r) ++c;
  return c;
}

inline std::string dump_matrix_for_debug(const Eigen::MatrixXcd& m) {
  std::string path = "arcscat_eig_failure.bin";
  std::ofstream os(path, std::ios::binary);
  const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
  os.write("ARCF", 4);
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof(re));
      os.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  return path;
}

}  // namespace detail

// Full complex spectrum of a dense matrix via LAPACK's nonsymmetric
// eigensolver, with greedy radius-based cluster counts.
inline EigenReport eigenvalues_of(const Eigen::MatrixXcd& matrix,
                                  double cluster_radius = 0.05) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("eigenvalues_of: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(matrix.rows());
  Eigen::MatrixXcd a = matrix;  // zgeev destroys its input
  std::vector<cplx> w(static_cast<std::size_t>(n));
  // std::complex<double> is layout-compatible with LAPACK's complex double
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(a.data()),
      n, reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) {
    const std::string path = detail::dump_matrix_for_debug(matrix);
    throw std::runtime_error("eigensolver failed to converge (info=" +
                             std::to_string(info) + "); matrix dumped to " + path);
  }
  EigenReport rep;
  rep.eigenvalues = std::move(w);
  rep.cluster_radius = cluster_radius;
  rep.clusters = detail::find_clusters(rep.eigenvalues, cluster_radius);
  rep.min_abs = std::numeric_limits<double>::infinity();
  for (const auto& z : rep.eigenvalues) rep.min_abs = std::min(rep.min_abs, std::abs(z));
  return rep;
}

inline EigenReport eigenvalues_of(const operators::DiscreteOperator& op,
                                  double cluster_radius = 0.05) {
  return eigenvalues_of(op.m, cluster_radius);
}

// ---------------------------------------------------------------------------
// Predicted accumulation points of the composite operators
// ---------------------------------------------------------------------------

// For Lame parameters (lambda, mu) the two spectral accumulation points of
// the regularized composites are -1/4 and -1/4 + (mu / (2(lambda+2mu)))^2.
inline double elastic_cluster_constant(double lambda, double mu) {
  return mu / (2.0 * (lambda + 2.0 * mu));
}

inline cplx cluster_a() { return cplx(-0.25, 0.0); }

inline cplx cluster_b(double lambda, double mu) {
  const double c = elastic_cluster_constant(lambda, mu);
  return cplx(-0.25 + c * c, 0.0);
}

// ---------------------------------------------------------------------------
// Chebyshev coefficient-space oracle
// ---------------------------------------------------------------------------
//
// The weighted logarithmic-kernel operators on the flat strip act diagonally
// on Chebyshev polynomials (w = sqrt(1-t^2)):
//
//   L[w^{-1} T_n] = d_n T_n,   d_n = log(2)/2 (n=0), 1/(2n) (n>0),
//   d/dt L[(w U_n)'] = e_n U_n,  e_n = -(n+1)/2,
//
// with L the convolution against -(1/2pi) log|t-s|.  Composing the two in
// coefficient space (first kind in, first kind out) uses the basis changes
//   T_0 = U_0,  T_1 = U_1/2,  T_n = (U_n - U_{n-2})/2,
//   U_m = 2 sum_{j<=m, m-j even} T_j  (the j=0 term counted once, not twice).
// The composition is upper triangular with diagonal e_n d_n, which equals
// -log(2)/4 at n=0 and -1/4 - 1/(4n) for n >= 1.

inline double cheb_d(int n) { return n == 0 ? 0.5 * std::log(2.0) : 0.5 / n; }
inline double cheb_e(int n) { return -0.5 * (n + 1); }

struct ChebCoeffOracle {
  Eigen::MatrixXd t_to_u;    // first-kind coeffs -> second-kind coeffs of the same poly
  Eigen::MatrixXd u_to_t;    // second-kind coeffs -> first-kind coeffs
  Eigen::MatrixXd diag_d;    // diag(d_n) on first-kind coefficients
  Eigen::MatrixXd diag_e;    // diag(e_n) on second-kind coefficients
  Eigen::MatrixXd composite; // diag_d * u_to_t * diag_e * t_to_u
};

inline ChebCoeffOracle cheb_helmholtz_oracle(int m) {
  if (m < 1) throw std::invalid_argument("cheb_helmholtz_oracle: truncation must be >= 1");
  ChebCoeffOracle o;
  o.t_to_u = Eigen::MatrixXd::Zero(m, m);
  o.u_to_t = Eigen::MatrixXd::Zero(m, m);
  o.diag_d = Eigen::MatrixXd::Zero(m, m);
  o.diag_e = Eigen::MatrixXd::Zero(m, m);
  for (int n = 0; n < m; ++n) {
    o.diag_d(n, n) = cheb_d(n);
    o.diag_e(n, n) = cheb_e(n);
    // T_n in the U basis
    o.t_to_u(n, n) = n == 0 ? 1.0 : 0.5;
    if (n >= 2) o.t_to_u(n - 2, n) = -0.5;
    // U_n in the T basis
    for (int j = n; j >= 0; j -= 2) o.u_to_t(j, n) = j == 0 ? 1.0 : 2.0;
  }
  o.composite = o.diag_d * o.u_to_t * o.diag_e * o.t_to_u;
  return o;
}

// Exact diagonal of the composite: e_n d_n.
inline double cheb_composite_diagonal(int n) {
  return n == 0 ? -0.25 * std::log(2.0) : -0.25 - 0.25 / n;
}

// ---------------------------------------------------------------------------
// CSV export of a spectrum
// ---------------------------------------------------------------------------

inline void write_eigenvalues_csv(const std::string& path, const EigenReport& rep,
                                  const std::string& tag, std::size_t n, double omega,
                                  double lambda, double mu) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  char head[256];
  std::snprintf(head, sizeof(head), "# tag=%s,N=%zu,omega=%.17g,lambda=%.17g,mu=%.17g",
                tag.c_str(), n, omega, lambda, mu);
  os << head << "\n# re,im\n";
  char line[128];
  for (const auto& z : rep.eigenvalues) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g", z.real(), z.imag());
    os << line << "\n";
  }
}

}  // namespace arcscat::spectrum
