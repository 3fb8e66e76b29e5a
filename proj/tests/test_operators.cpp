#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "arcscat/operators.hpp"

using namespace arcscat;
using namespace arcscat::kernels;
using namespace arcscat::operators;
using cd = std::complex<double>;

namespace {

WaveCtx default_ctx() { return make_wave_ctx(MediumParams{}); }

// kernel log|t - tau| as a single scalar family term in the p-p slot
std::vector<FamilyTerm> pure_log_family() {
    FamilyTerm t;
    t.r0 = 2; t.c0 = 2; t.nr = 1; t.nc = 1; t.wexp = -1;
    t.eval = [](const PairData& p, cd* a, cd* v) {
        a[0] = 1.0;
        v[0] = std::log(std::abs(p.x->t - p.y->t));
    };
    t.diag = [](const NodeGeom&, cd* a, cd* b) {
        a[0] = 1.0;
        b[0] = 0.0;
    };
    return {t};
}

}  // namespace

TEST_CASE("log kernel maps Chebyshev polynomials to their classical images") {
    // int_-1^1 log|t-tau| T_n(tau)/sqrt(1-tau^2) dtau = -pi log 2 (n = 0),
    // -(pi/n) T_n(t) otherwise
    const WaveCtx wc = default_ctx();
    const ArcParametrization arc = make_arc("flat_strip");
    for (int n : {16, 64}) {
        const ChebyshevGrid grid(n);
        const DiscreteOperator op = assemble_family(wc, arc, grid, pure_log_family(), "log");
        for (int mode : {0, 1, 3, 7}) {
            VectorXcd phi = VectorXcd::Zero(3 * n);
            for (int j = 0; j < n; ++j) phi[2 * n + j] = std::cos(mode * grid.angles[j]);
            const VectorXcd out = op.m * phi;
            for (int i = 0; i < n; ++i) {
                const cd expect = mode == 0 ? cd(-M_PI * std::log(2.0), 0.0)
                                            : cd(-(M_PI / mode) * std::cos(mode * grid.angles[i]), 0.0);
                INFO("n " << n << " mode " << mode << " row " << i);
                CHECK(std::abs(out[2 * n + i] - expect) < 1e-12);
                CHECK(std::abs(out[i]) == 0.0);  // u-blocks untouched
            }
        }
    }
}

TEST_CASE("quadrature weight bookkeeping is exact for constant kernels") {
    const WaveCtx wc = default_ctx();
    const ArcParametrization arc = make_arc("flat_strip");
    const int n = 24;
    const ChebyshevGrid grid(n);
    for (int a : {-1, 1}) {
        FamilyTerm t;
        t.r0 = 0; t.c0 = 0; t.nr = 1; t.nc = 1; t.wexp = a;
        t.eval = [](const PairData&, cd* lc, cd* v) { lc[0] = 0.0; v[0] = 1.0; };
        t.diag = [](const NodeGeom&, cd* lc, cd* b) { lc[0] = 0.0; b[0] = 1.0; };
        const DiscreteOperator op = assemble_family(wc, arc, grid, {t}, "const");
        VectorXcd one = VectorXcd::Zero(3 * n);
        for (int j = 0; j < n; ++j) one[j] = 1.0;
        const VectorXcd out = op.m * one;
        // int_0^pi sin^{1+a}(theta) dtheta: pi for a=-1, pi/2 for a=+1
        const double expect = a == -1 ? M_PI : M_PI / 2.0;
        for (int i = 0; i < n; ++i) CHECK(std::abs(out[i] - expect) < 1e-13);
    }
}

TEST_CASE("coupling constants switch off the off-diagonal blocks") {
    const ArcParametrization arc = make_arc("fish");
    const ChebyshevGrid grid(12);

    MediumParams no_eta;  // pressure no longer feels displacement
    no_eta.eta = 0.0;
    const WaveCtx wc1 = make_wave_ctx(no_eta);
    const DiscreteOperator sl = assemble_single_layer(wc1, arc, grid);
    // E12 carries the i omega eta factor, so the p-u block of the transpose dies
    CHECK(sl.m.block(2 * 12, 0, 12, 2 * 12).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sl.m.block(0, 2 * 12, 2 * 12, 12).cwiseAbs().maxCoeff() > 0.0);

    MediumParams no_gamma;  // displacement no longer feels pressure
    no_gamma.gamma = 0.0;
    const WaveCtx wc2 = make_wave_ctx(no_gamma);
    const DiscreteOperator sl2 = assemble_single_layer(wc2, arc, grid);
    CHECK(sl2.m.block(0, 2 * 12, 2 * 12, 12).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sl2.m.block(2 * 12, 0, 12, 2 * 12).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("second- and third-kind families share the pressure-pressure block") {
    const WaveCtx wc = default_ctx();
    const ArcParametrization arc = make_arc("spiral");
    const ChebyshevGrid grid(16);
    const DiscreteOperator v2 = assemble_regularized(wc, arc, grid, 2);
    const DiscreteOperator v3 = assemble_regularized(wc, arc, grid, 3);
    const int n = grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(v2.m(2 * n + i, 2 * n + j) == v3.m(2 * n + i, 2 * n + j));
    // but the coupling blocks differ
    CHECK((v2.m.block(0, 2 * n, 2 * n, n) - v3.m.block(0, 2 * n, 2 * n, n)).cwiseAbs().maxCoeff() >
          1e-6);
}

TEST_CASE("composition checks tags and grids") {
    const WaveCtx wc = default_ctx();
    const ArcParametrization arc = make_arc("flat_strip");
    const ChebyshevGrid grid(8);
    const DiscreteOperator sl = assemble_single_layer(wc, arc, grid);
    const DiscreteOperator id = identity_operator(grid);
    const DiscreteOperator c = compose(id, sl);
    CHECK(c.tag == "I*V1w");
    CHECK((c.m - sl.m).cwiseAbs().maxCoeff() == 0.0);
    const ChebyshevGrid other(10);
    CHECK_THROWS_AS(compose(sl, identity_operator(other)), std::invalid_argument);
}

TEST_CASE("binary dump round-trips") {
    const WaveCtx wc = default_ctx();
    const ArcParametrization arc = make_arc("flat_strip");
    const ChebyshevGrid grid(4);
    const DiscreteOperator sl = assemble_single_layer(wc, arc, grid);
    const std::string path = "dump_test.bin";
    dump_binary(path, sl, 1);
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    char magic[4];
    f.read(magic, 4);
    CHECK(std::string(magic, 4) == "ARCS");
    std::uint32_t n = 0;
    f.read(reinterpret_cast<char*>(&n), 4);
    CHECK(n == 4u);
    std::uint8_t tag = 0;
    f.read(reinterpret_cast<char*>(&tag), 1);
    CHECK(tag == 1);
    double re = 0.0, im = 0.0;
    f.read(reinterpret_cast<char*>(&re), 8);
    f.read(reinterpret_cast<char*>(&im), 8);
    CHECK(re == sl.m(0, 0).real());
    CHECK(im == sl.m(0, 0).imag());
    std::remove(path.c_str());
}
