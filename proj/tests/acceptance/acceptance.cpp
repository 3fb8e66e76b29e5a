// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Criteria cover quadrature exactness, kernel splits, the
// coefficient-space oracle, self-convergence, GMRES iteration counts,
// spectral clustering, a finite-difference physics residual, and
// direct-vs-regularized consistency.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <arcscat/bvp.hpp>
#include <arcscat/cli.hpp>
#include <arcscat/geometry.hpp>
#include <arcscat/kernels.hpp>
#include <arcscat/medium.hpp>
#include <arcscat/operators.hpp>
#include <arcscat/quadrature.hpp>
#include <arcscat/specfun.hpp>
#include <arcscat/spectrum.hpp>

using namespace arcscat;
using kernels::FamilyTerm;
using kernels::NodeGeom;
using kernels::PairData;
using kernels::WaveCtx;
using cdbl = std::complex<double>;

namespace {

struct Gate {
  std::array<std::string, 10> lines{};
  int failed = 0;

  void set(int k, bool ok, const std::string& msg) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s criterion %d: %s", ok ? "PASS" : "FAIL", k,
                  msg.c_str());
    lines[k] = buf;
    if (!ok) ++failed;
    std::fflush(stdout);
  }
};

double now_s() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

void progress(const std::string& what) {
  std::printf("[%8.1fs] %s\n", now_s(), what.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// criterion 1: log-quadrature exactness
// ---------------------------------------------------------------------------
void criterion_1(Gate& gate) {
  progress("criterion 1: log-quadrature exactness");
  double worst = 0.0;
  for (int n_pts : {16, 64, 256}) {
    const ChebyshevGrid g(n_pts);
    const auto w = log_weights(n_pts);
    const VectorXcd factor = VectorXcd::Constant(n_pts, cdbl(-1.0 / (2.0 * M_PI), 0.0));
    for (int n = 0; n < n_pts; ++n) {
      VectorXcd density(n_pts);
      for (int j = 0; j < n_pts; ++j) density[j] = std::cos(n * g.angles[j]);
      const double lam = n == 0 ? 0.5 * std::log(2.0) : 0.5 / n;
      for (int i = 0; i < n_pts; ++i) {
        const cdbl got = apply_log_quadrature(w, factor, density, i);
        worst = std::max(worst, std::abs(got - cdbl(lam * std::cos(n * g.angles[i]))));
      }
    }
  }
  char msg[256];
  std::snprintf(msg, sizeof(msg),
                "discrete log rule reproduces lambda_n cos(n theta) for N in "
                "{16,64,256}, max error %.2e (tol 1e-12)",
                worst);
  gate.set(1, worst <= 1e-12, msg);
}

// ---------------------------------------------------------------------------
// criterion 2: kernel-split reconstruction and diagonal continuity
// ---------------------------------------------------------------------------
void criterion_2(Gate& gate) {
  progress("criterion 2: kernel-split reconstruction");
  const MediumParams med;
  const WaveCtx wc = kernels::make_wave_ctx(med);
  const auto family = kernels::single_layer_family(wc);
  std::mt19937 rng(20260826);
  std::uniform_real_distribution<double> ang(0.05, M_PI - 0.05);

  double worst_rel = 0.0;
  bool diag_ok = true;
  for (const char* name : {"flat_strip", "spiral", "fish"}) {
    const ArcParametrization arc = make_arc(name);
    for (int trial = 0; trial < 100; ++trial) {
      double ta = ang(rng), tb = ang(rng);
      while (std::abs(std::cos(ta) - std::cos(tb)) < 1e-3) tb = ang(rng);
      const NodeGeom gx = kernels::node_geom(arc, ta);
      const NodeGeom gy = kernels::node_geom(arc, tb);
      const PairData p = kernels::make_pair(wc, gx, gy);
      const auto e = kernels::eval_fundamental(wc, gx.x, gy.x);
      const double lt = std::log(std::abs(gx.t - gy.t));
      std::array<std::array<cdbl, 3>, 3> recon{};
      for (const auto& term : family) {
        cdbl a[4], v[4];
        term.eval(p, a, v);
        for (int i = 0; i < term.nr; ++i)
          for (int j = 0; j < term.nc; ++j) {
            // E^1 log|t-tau| + E^2 with E^2 = v - a log|t-tau|
            const cdbl smooth = v[i * term.nc + j] - a[i * term.nc + j] * lt;
            recon[term.r0 + i][term.c0 + j] += a[i * term.nc + j] * lt + smooth;
          }
      }
      double scale = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) scale = std::max(scale, std::abs(e[a][b]));
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          worst_rel = std::max(worst_rel, std::abs(recon[a][b] - e[b][a]) / scale);
    }
    // diagonal limits: finite, and approached continuously along the arc
    for (const auto& term : family) {
      for (double theta0 : {0.9, 2.2}) {
        const NodeGeom gx = kernels::node_geom(arc, theta0);
        cdbl dlog[4], dreg[4];
        term.diag(gx, dlog, dreg);
        double scale = 1.0;
        {
          const NodeGeom gy = kernels::node_geom(arc, theta0 + 0.3);
          const PairData p = kernels::make_pair(wc, gx, gy);
          cdbl a[4], v[4];
          term.eval(p, a, v);
          for (int i = 0; i < term.nr * term.nc; ++i) {
            scale = std::max(scale, std::abs(v[i]));
            scale = std::max(scale, std::abs(dreg[i]));
          }
        }
        for (int i = 0; i < term.nr * term.nc; ++i)
          if (!std::isfinite(dreg[i].real()) || !std::isfinite(dreg[i].imag()) ||
              !std::isfinite(dlog[i].real()) || !std::isfinite(dlog[i].imag()))
            diag_ok = false;
        double prev = 1e300;
        for (double delta : {1e-3, 1e-5}) {
          const NodeGeom gy = kernels::node_geom(arc, theta0 + delta);
          const PairData p = kernels::make_pair(wc, gx, gy);
          cdbl a[4], v[4];
          term.eval(p, a, v);
          const double lt = std::log(std::abs(gx.t - gy.t));
          double err = 0.0;
          for (int i = 0; i < term.nr * term.nc; ++i) {
            err = std::max(err, std::abs((v[i] - a[i] * lt) - dreg[i]));
            err = std::max(err, std::abs(a[i] - dlog[i]) / 10.0);
          }
          if (!(err <= std::min(prev * 0.9 + 1e-9, 3e-1 * scale))) diag_ok = false;
          if (delta == 1e-5 && !(err <= 2e-3 * scale)) diag_ok = false;
          prev = err;
        }
      }
    }
  }
  char msg[256];
  std::snprintf(msg, sizeof(msg),
                "split matches the fundamental solution at 100 random pairs per arc, "
                "max rel error %.2e (tol 1e-11); diagonal limits %s",
                worst_rel, diag_ok ? "finite and continuous" : "NOT continuous");
  gate.set(2, worst_rel <= 1e-11 && diag_ok, msg);
}

// ---------------------------------------------------------------------------
// criterion 3: Chebyshev coefficient oracle
// ---------------------------------------------------------------------------
void criterion_3(Gate& gate) {
  progress("criterion 3: coefficient-space oracle");
  const auto o = spectrum::cheb_helmholtz_oracle(65);
  double diag_err = 0.0, below = 0.0;
  for (int n = 0; n <= 64; ++n)
    diag_err = std::max(diag_err,
                        std::abs(o.composite(n, n) - spectrum::cheb_composite_diagonal(n)));
  for (int i = 0; i < 65; ++i)
    for (int j = 0; j < i; ++j) below = std::max(below, std::abs(o.composite(i, j)));
  char msg[256];
  std::snprintf(msg, sizeof(msg),
                "composite diagonal matches e_n d_n for n <= 64 (max err %.2e) and is "
                "upper triangular (max below-diagonal %.2e, tol 1e-13)",
                diag_err, below);
  gate.set(3, diag_err <= 1e-13 && below <= 1e-13, msg);
}

// ---------------------------------------------------------------------------
// spiral experiment block shared by criteria 4, 8, 9
// ---------------------------------------------------------------------------

using Field = std::vector<std::array<cdbl, 3>>;

struct SpiralOps {
  operators::DiscreteOperator v1, v2, v3, v4;
};

SpiralOps assemble_all(const WaveCtx& wc, const ArcParametrization& arc,
                       const ChebyshevGrid& grid) {
  SpiralOps ops;
  ops.v1 = operators::assemble_single_layer(wc, arc, grid);
  ops.v2 = operators::assemble_regularized(wc, arc, grid, 2);
  ops.v3 = operators::assemble_regularized(wc, arc, grid, 3);
  ops.v4 = operators::assemble_regularized(wc, arc, grid, 4);
  return ops;
}

bvp::Density solve_kind(const SpiralOps& ops, int kind, bool reg, const VectorXcd& rhs,
                        double tol, bvp::SolveReport& rep) {
  const operators::DiscreteOperator* left = nullptr;
  const operators::DiscreteOperator* right = nullptr;
  if (!reg) {
    right = kind == 1 ? &ops.v1 : kind == 2 ? &ops.v2 : kind == 3 ? &ops.v3 : &ops.v4;
  } else if (kind <= 2) {
    left = &ops.v2;
    right = &ops.v1;
  } else {
    left = &ops.v4;
    right = &ops.v3;
  }
  return bvp::solve_with_operators(kind, reg, left, *right, rhs, tol, rep);
}

Field field_of(const WaveCtx& wc, const ArcParametrization& arc,
               const ChebyshevGrid& grid, const SpiralOps& ops, int kind, bool reg,
               const VectorXcd& density, const std::vector<Vec2>& pts) {
  const operators::DiscreteOperator* pre = nullptr;
  if (reg && kind == 2) pre = &ops.v1;
  if (reg && kind == 4) pre = &ops.v3;
  return bvp::near_field(wc, arc, grid, kind, reg, density, pts, pre);
}

struct SpiralResults {
  std::array<double, 5> eps150{}, eps300{};  // 1-based by kind, regularized
  std::array<double, 5> cross300{};          // direct-vs-regularized at N=300
  VectorXcd density300_kind1;                // for the physics residual
  bool all_converged = true;
};

SpiralResults run_spiral_block() {
  const MediumParams med;  // omega = 10
  const WaveCtx wc = kernels::make_wave_ctx(med);
  const ArcParametrization arc = make_arc("spiral");
  const auto circle = bvp::sample_circle(4.0, 128);
  const double tol = 1e-12;
  SpiralResults res;

  std::array<Field, 5> ref_fields, f150, f300, d300;
  {
    progress("criterion 4: assembling spiral reference operators (N_K=800)");
    const ChebyshevGrid grid(800);
    const SpiralOps ops = assemble_all(wc, arc, grid);
    for (int kind = 1; kind <= 4; ++kind) {
      const bvp::IncidentField inc(med, 0.0);
      const VectorXcd g = bvp::boundary_data(kind, inc, arc, grid);
      bvp::SolveReport rep;
      const auto den = solve_kind(ops, kind, true, g, tol, rep);
      res.all_converged = res.all_converged && rep.converged;
      ref_fields[kind] = field_of(wc, arc, grid, ops, kind, true, den.values, circle);
    }
  }
  for (int n : {150, 300}) {
    progress("criterion 4/9: spiral solves at N=" + std::to_string(n));
    const ChebyshevGrid grid(n);
    const SpiralOps ops = assemble_all(wc, arc, grid);
    for (int kind = 1; kind <= 4; ++kind) {
      const bvp::IncidentField inc(med, 0.0);
      const VectorXcd g = bvp::boundary_data(kind, inc, arc, grid);
      bvp::SolveReport rep;
      const auto den = solve_kind(ops, kind, true, g, tol, rep);
      res.all_converged = res.all_converged && rep.converged;
      const Field f = field_of(wc, arc, grid, ops, kind, true, den.values, circle);
      (n == 150 ? f150 : f300)[kind] = f;
      if (n == 300) {
        if (kind == 1) res.density300_kind1 = den.values;
        bvp::SolveReport drep;
        const auto dden = solve_kind(ops, kind, false, g, tol, drep);
        res.all_converged = res.all_converged && drep.converged;
        d300[kind] = field_of(wc, arc, grid, ops, kind, false, dden.values, circle);
      }
    }
  }
  for (int kind = 1; kind <= 4; ++kind) {
    res.eps150[kind] = bvp::near_field_error(f150[kind], ref_fields[kind]);
    res.eps300[kind] = bvp::near_field_error(f300[kind], ref_fields[kind]);
    res.cross300[kind] = bvp::near_field_error(d300[kind], f300[kind]);
  }
  return res;
}

void criterion_4(Gate& gate, const SpiralResults& res) {
  bool ok = res.all_converged;
  for (int kind = 1; kind <= 4; ++kind) {
    if (!(res.eps150[kind] >= 1e-7 && res.eps150[kind] <= 1e-3)) ok = false;
    if (!(res.eps300[kind] <= 1e-8)) ok = false;
  }
  char msg[512];
  std::snprintf(msg, sizeof(msg),
                "spiral self-convergence vs N_K=800: eps(150) = {%.1e, %.1e, %.1e, %.1e} "
                "(need [1e-7,1e-3]), eps(300) = {%.1e, %.1e, %.1e, %.1e} (need <= 1e-8)"
                "%s",
                res.eps150[1], res.eps150[2], res.eps150[3], res.eps150[4],
                res.eps300[1], res.eps300[2], res.eps300[3], res.eps300[4],
                ok ? ""
                   : "; note: the published reference table itself lists 1.57e-3 for "
                     "the traction kinds at N=150, outside the stated window");
  gate.set(4, ok, msg);
}

void criterion_9(Gate& gate, const SpiralResults& res) {
  bool ok = res.all_converged;
  for (int kind = 1; kind <= 4; ++kind)
    if (!(res.cross300[kind] <= 1e-8)) ok = false;
  char msg[512];
  std::snprintf(msg, sizeof(msg),
                "direct vs regularized near fields (spiral, N=300): eps = "
                "{%.1e, %.1e, %.1e, %.1e} (need <= 1e-8)",
                res.cross300[1], res.cross300[2], res.cross300[3], res.cross300[4]);
  gate.set(9, ok, msg);
}

// ---------------------------------------------------------------------------
// criterion 8: finite-difference physics residual of the near field
// ---------------------------------------------------------------------------
void criterion_8(Gate& gate, const SpiralResults& res) {
  progress("criterion 8: physics residual of the kind-1 near field");
  const MediumParams med;
  const WaveCtx wc = kernels::make_wave_ctx(med);
  const ArcParametrization arc = make_arc("spiral");
  const ChebyshevGrid grid(300);
  const auto centers = bvp::sample_circle(4.0, 32);
  const double h = 1e-3;
  const cdbl q(0.0, med.omega / med.kappa);
  const cdbl iwe(0.0, med.omega * med.eta);

  // fields on the 5x5 tensor stencil around every center
  std::vector<Vec2> pts;
  pts.reserve(centers.size() * 25);
  for (const auto& c : centers)
    for (int iy = -2; iy <= 2; ++iy)
      for (int ix = -2; ix <= 2; ++ix) pts.push_back({c[0] + ix * h, c[1] + iy * h});
  const Field vals =
      bvp::near_field(wc, arc, grid, 1, true, res.density300_kind1, pts);

  // fourth-order five-point first/second derivative weights
  const double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  const double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

  double worst = 0.0;
  for (std::size_t ci = 0; ci < centers.size(); ++ci) {
    auto f = [&](int comp, int ix, int iy) {
      return vals[ci * 25 + (iy + 2) * 5 + (ix + 2)][comp];
    };
    auto dx = [&](int comp, int iy) {
      cdbl s = 0.0;
      for (int k = 0; k < 5; ++k) s += c1[k] * f(comp, k - 2, iy);
      return s / h;
    };
    auto dy = [&](int comp, int ix) {
      cdbl s = 0.0;
      for (int k = 0; k < 5; ++k) s += c1[k] * f(comp, ix, k - 2);
      return s / h;
    };
    auto dxx = [&](int comp) {
      cdbl s = 0.0;
      for (int k = 0; k < 5; ++k) s += c2[k] * f(comp, k - 2, 0);
      return s / (h * h);
    };
    auto dyy = [&](int comp) {
      cdbl s = 0.0;
      for (int k = 0; k < 5; ++k) s += c2[k] * f(comp, 0, k - 2);
      return s / (h * h);
    };
    auto dxy = [&](int comp) {
      cdbl s = 0.0;
      for (int kx = 0; kx < 5; ++kx)
        for (int ky = 0; ky < 5; ++ky) s += c1[kx] * c1[ky] * f(comp, kx - 2, ky - 2);
      return s / (h * h);
    };

    const cdbl u1 = f(0, 0, 0), u2 = f(1, 0, 0), p = f(2, 0, 0);
    const cdbl div_x = dxx(0) + dxy(1);  // d/dx (div u)
    const cdbl div_y = dxy(0) + dyy(1);  // d/dy (div u)
    const cdbl lap1 = dxx(0) + dyy(0), lap2 = dxx(1) + dyy(1);
    const double lm = med.lambda + med.mu, ro2 = med.rho * med.omega * med.omega;

    const cdbl r1 = med.mu * lap1 + lm * div_x + ro2 * u1 - med.gamma * dx(2, 0);
    const cdbl r2 = med.mu * lap2 + lm * div_y + ro2 * u2 - med.gamma * dy(2, 0);
    const cdbl r3 = dxx(2) + dyy(2) + q * p + iwe * (dx(0, 0) + dy(1, 0));

    const double s1 = std::max({std::abs(med.mu * lap1), std::abs(lm * div_x),
                                std::abs(ro2 * u1), 1e-30});
    const double s2 = std::max({std::abs(med.mu * lap2), std::abs(lm * div_y),
                                std::abs(ro2 * u2), 1e-30});
    const double s3 =
        std::max({std::abs(dxx(2) + dyy(2)), std::abs(q * p), 1e-30});
    worst = std::max({worst, std::abs(r1) / s1, std::abs(r2) / s2, std::abs(r3) / s3});
  }
  char msg[256];
  std::snprintf(msg, sizeof(msg),
                "coupled-system residual of the kind-1 regularized near field at 32 "
                "points on |x|=4: max relative %.2e (tol 1e-4)",
                worst);
  gate.set(8, worst < 1e-4, msg);
}

// ---------------------------------------------------------------------------
// criteria 5 & 6: GMRES iteration counts
// ---------------------------------------------------------------------------
void criterion_iterations(Gate& gate, int which, const char* arc_name,
                          const std::array<int, 4>& expect_direct,
                          const std::array<int, 4>& expect_reg) {
  progress(std::string("criterion ") + std::to_string(which) + ": iteration counts on " +
           arc_name);
  const MediumParams med;  // omega = 10
  const WaveCtx wc = kernels::make_wave_ctx(med);
  const ArcParametrization arc = make_arc(arc_name);
  const ChebyshevGrid grid(150);
  const bvp::IncidentField inc(med, M_PI / 4.0);
  const SpiralOps ops = assemble_all(wc, arc, grid);

  std::array<int, 4> direct{}, reg{};
  bool ok = true;
  for (int kind = 1; kind <= 4; ++kind) {
    const VectorXcd g = bvp::boundary_data(kind, inc, arc, grid);
    bvp::SolveReport rd, rr;
    solve_kind(ops, kind, false, g, 1e-10, rd);
    solve_kind(ops, kind, true, g, 1e-10, rr);
    ok = ok && rd.converged && rr.converged;
    direct[kind - 1] = rd.n_iterations;
    reg[kind - 1] = rr.n_iterations;
    const int ed = expect_direct[kind - 1], er = expect_reg[kind - 1];
    if (!(direct[kind - 1] >= ed / 2 && direct[kind - 1] <= ed + ed / 2)) ok = false;
    if (!(reg[kind - 1] >= er / 2 && reg[kind - 1] <= er + er / 2)) ok = false;
    if (kind == 1) {
      if (!(reg[0] <= direct[0])) ok = false;
    } else if (!(reg[kind - 1] < direct[kind - 1])) {
      ok = false;
    }
  }
  char msg[512];
  std::snprintf(msg, sizeof(msg),
                "%s, N=150, tol 1e-10: direct {%d,%d,%d,%d} (expect {%d,%d,%d,%d} "
                "+-50%%), regularized {%d,%d,%d,%d} (expect {%d,%d,%d,%d} +-50%%), "
                "regularized improves every kind",
                arc_name, direct[0], direct[1], direct[2], direct[3], expect_direct[0],
                expect_direct[1], expect_direct[2], expect_direct[3], reg[0], reg[1],
                reg[2], reg[3], expect_reg[0], expect_reg[1], expect_reg[2],
                expect_reg[3]);
  gate.set(which, ok, msg);
}

// ---------------------------------------------------------------------------
// criterion 7: eigenvalue clusters
// ---------------------------------------------------------------------------

struct ClusterCheck {
  bool centers_ok = true;
  std::size_t count_a = 0, count_b = 0;  // basin populations matched to targets
};

ClusterCheck check_clusters(const spectrum::EigenReport& rep, cdbl ca, cdbl cb) {
  ClusterCheck out;
  const double bw = rep.cluster_radius / 4.0;  // mode-seeking bandwidth
  if (rep.clusters.empty()) {
    out.centers_ok = false;
    return out;
  }
  if (std::abs(ca - cb) < bw) {
    // targets are closer than the clustering can resolve: the single most
    // populous cluster must cover both
    const auto& top = rep.clusters[0];
    out.centers_ok = std::abs(top.center - ca) < 0.02 && std::abs(top.center - cb) < 0.02;
    out.count_a = out.count_b = top.count;
    return out;
  }
  if (rep.clusters.size() < 2) {
    out.centers_ok = false;
    return out;
  }
  const auto& t0 = rep.clusters[0];
  const auto& t1 = rep.clusters[1];
  const bool assign_01 = std::abs(t0.center - ca) < 0.02 && std::abs(t1.center - cb) < 0.02;
  const bool assign_10 = std::abs(t1.center - ca) < 0.02 && std::abs(t0.center - cb) < 0.02;
  out.centers_ok = assign_01 || assign_10;
  if (assign_01) {
    out.count_a = t0.count;
    out.count_b = t1.count;
  } else {
    out.count_a = t1.count;
    out.count_b = t0.count;
  }
  return out;
}

void criterion_7(Gate& gate) {
  const ArcParametrization arc = make_arc("flat_strip");
  bool ok = true;
  int checked = 0, good = 0;
  std::string first_fail;

  struct Combo {
    double lambda, omega;
  };
  std::vector<Combo> combos = {{2.0, 10.0}, {2.0, 50.0}};
  // lambda sweep at omega = 50, tracking cluster_b
  for (double l : {-0.99, 1.0, 50.0}) combos.push_back({l, 50.0});

  for (const auto& combo : combos) {
    MediumParams med;
    med.lambda = combo.lambda;
    med.omega = combo.omega;
    const WaveCtx wc = kernels::make_wave_ctx(med);
    const cdbl ca = spectrum::cluster_a();
    const cdbl cb = spectrum::cluster_b(med.lambda, med.mu);

    std::map<std::string, std::pair<std::size_t, std::size_t>> prev_counts;
    for (int n : {100, 200, 400}) {
      char what[128];
      std::snprintf(what, sizeof(what),
                    "criterion 7: clusters at lambda=%g omega=%g N=%d", med.lambda,
                    med.omega, n);
      progress(what);
      const ChebyshevGrid grid(n);
      const auto v1 = operators::assemble_single_layer(wc, arc, grid);
      const auto v2 = operators::assemble_regularized(wc, arc, grid, 2);
      const auto v3 = operators::assemble_regularized(wc, arc, grid, 3);
      const auto v4 = operators::assemble_regularized(wc, arc, grid, 4);
      for (const auto& [tag, op] :
           {std::pair<std::string, operators::DiscreteOperator>{
                "V2wV1w", operators::compose(v2, v1)},
            {"V4wV3w", operators::compose(v4, v3)}}) {
        const auto rep = spectrum::eigenvalues_of(op);
        const ClusterCheck cc = check_clusters(rep, ca, cb);
        ++checked;
        bool this_ok = cc.centers_ok && rep.min_abs > 0.0;
        if (prev_counts.count(tag)) {
          if (cc.count_a < prev_counts[tag].first) this_ok = false;
          if (cc.count_b < prev_counts[tag].second) this_ok = false;
        }
        prev_counts[tag] = {cc.count_a, cc.count_b};
        if (this_ok) {
          ++good;
        } else if (first_fail.empty()) {
          char buf[256];
          std::snprintf(buf, sizeof(buf),
                        " (first failure: lambda=%g omega=%g N=%d %s, top centers "
                        "%.4f%+.4fi / counts a=%zu b=%zu)",
                        med.lambda, med.omega, n, tag.c_str(),
                        rep.clusters.empty() ? 0.0 : rep.clusters[0].center.real(),
                        rep.clusters.empty() ? 0.0 : rep.clusters[0].center.imag(),
                        cc.count_a, cc.count_b);
          first_fail = buf;
        }
        ok = ok && this_ok;
      }
    }
  }
  char msg[512];
  std::snprintf(msg, sizeof(msg),
                "composite spectra cluster at -1/4 and -1/4+C^2 with counts "
                "non-decreasing in N: %d/%d configurations%s",
                good, checked, first_fail.c_str());
  gate.set(7, ok, msg);
}

}  // namespace

int main() {
  Gate gate;
  criterion_1(gate);
  criterion_2(gate);
  criterion_3(gate);

  const SpiralResults spiral = run_spiral_block();
  criterion_4(gate, spiral);
  criterion_iterations(gate, 5, "flat_strip", {35, 48, 176, 210}, {19, 12, 19, 15});
  criterion_iterations(gate, 6, "fish", {123, 230, 251, 348}, {62, 70, 62, 63});
  criterion_7(gate);
  criterion_8(gate, spiral);
  criterion_9(gate, spiral);

  std::printf("\n");
  for (int k = 1; k <= 9; ++k) std::printf("%s\n", gate.lines[k].c_str());
  std::printf("\nacceptance: %d/9 criteria passed\n", 9 - gate.failed);
  return gate.failed == 0 ? 0 : 1;
}
