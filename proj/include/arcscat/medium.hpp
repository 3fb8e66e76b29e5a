#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace arcscat {

using cd = std::complex<double>;

// Material constants of the Biot-type thermoelastic medium.
struct MediumParams {
    double lambda = 2.0;   // Lame modulus
    double mu     = 1.0;   // Lame modulus
    double rho    = 1.0;   // mass density
    double kappa  = 1.0;   // thermal diffusivity
    double gamma  = 0.1;   // coupling constant
    double eta    = 0.2;   // coupling constant
    double omega  = 10.0;  // angular frequency

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("MediumParams: mu must be positive");
        if (!(lambda + mu > 0.0)) throw std::invalid_argument("MediumParams: lambda + mu must be positive");
        if (!(rho > 0.0)) throw std::invalid_argument("MediumParams: rho must be positive");
        if (!(kappa > 0.0)) throw std::invalid_argument("MediumParams: kappa must be positive");
        if (!(omega > 0.0)) throw std::invalid_argument("MediumParams: omega must be positive");
    }
};

// Derived wavenumbers. kp, ks are the uncoupled longitudinal/transverse
// wavenumbers; k1, k2 solve the coupled characteristic system with both
// real and imaginary parts positive.
struct WaveNumbers {
    double kp = 0.0;
    double ks = 0.0;
    cd q;
    double epsilon = 0.0;
    cd k1;
    cd k2;

    cd k1sq() const { return k1 * k1; }
    cd k2sq() const { return k2 * k2; }
};

struct SpectralConstants {
    double c_lm  = 0.0;  // mu / (2(lambda+2mu))
    double c1_lm = 0.0;  // (lambda+3mu) / (2mu(lambda+2mu))
    double c2_lm = 0.0;  // 2mu(lambda+mu) / (lambda+2mu)
    cd cluster_a;        // -1/4
    cd cluster_b;        // -1/4 + c_lm^2
};

struct RegularizationConstants {
    cd c1;
    cd c2;
    cd c3;
};

namespace detail {
// principal square root with the branch fixed so Re>0, Im>0 for roots in
// the open upper half plane
inline cd sqrt_first_quadrant(cd z) {
    cd s = std::sqrt(z);
    if (s.real() < 0.0) s = -s;
    return s;
}
}  // namespace detail

inline WaveNumbers compute_wavenumbers(const MediumParams& m) {
    m.validate();
    WaveNumbers w;
    const double lp2m = m.lambda + 2.0 * m.mu;
    w.kp = m.omega * std::sqrt(m.rho / lp2m);
    w.ks = m.omega * std::sqrt(m.rho / m.mu);
    w.q = cd(0.0, m.omega / m.kappa);
    w.epsilon = m.gamma * m.eta * m.kappa / lp2m;

    // k1^2, k2^2 are the roots of z^2 - (q(1+eps)+kp^2) z + q kp^2 = 0
    const cd b = w.q * (1.0 + w.epsilon) + w.kp * w.kp;
    const cd c = w.q * w.kp * w.kp;
    cd disc = std::sqrt(b * b - 4.0 * c);
    // pick the sign that avoids cancellation in the larger root
    if (std::real(std::conj(b) * disc) < 0.0) disc = -disc;
    const cd z1 = 0.5 * (b + disc);
    const cd z2 = c / z1;

    cd ka = detail::sqrt_first_quadrant(z1);
    cd kb = detail::sqrt_first_quadrant(z2);
    // label k1 as the root of larger |Re k|
    if (std::abs(ka.real()) >= std::abs(kb.real())) {
        w.k1 = ka;
        w.k2 = kb;
    } else {
        w.k1 = kb;
        w.k2 = ka;
    }

    const cd dsq = w.k1sq() - w.k2sq();
    const double scale = std::max(std::norm(w.k1), std::norm(w.k2));
    if (std::abs(dsq) < 1e-10 * scale)
        throw std::domain_error("confluent wavenumbers");
    return w;
}

inline SpectralConstants spectral_constants(const MediumParams& m) {
    m.validate();
    SpectralConstants s;
    const double lp2m = m.lambda + 2.0 * m.mu;
    s.c_lm = m.mu / (2.0 * lp2m);
    s.c1_lm = (m.lambda + 3.0 * m.mu) / (2.0 * m.mu * lp2m);
    s.c2_lm = 2.0 * m.mu * (m.lambda + m.mu) / lp2m;
    s.cluster_a = cd(-0.25, 0.0);
    s.cluster_b = cd(-0.25 + s.c_lm * s.c_lm, 0.0);
    return s;
}

inline RegularizationConstants regularization_constants(const MediumParams& m, const WaveNumbers& w) {
    const cd k1s = w.k1sq(), k2s = w.k2sq();
    const cd dsq = k1s - k2s;
    const double scale = std::max(std::norm(w.k1), std::norm(w.k2));
    if (std::abs(dsq) < 1e-10 * scale)
        throw std::domain_error("confluent wavenumbers");
    const double lp2m = m.lambda + 2.0 * m.mu;
    const cd iweg = cd(0.0, m.omega) * m.eta * m.gamma;
    const double kp2 = w.kp * w.kp;
    RegularizationConstants r;
    r.c1 = (iweg * (kp2 + k1s) - k1s * (k1s - w.q) * lp2m) / dsq;
    r.c2 = (iweg * (kp2 + k2s) - k2s * (k2s - w.q) * lp2m) / dsq;
    r.c3 = 2.0 * m.mu / dsq * (iweg / lp2m - k2s + w.q);
    return r;
}

}  // namespace arcscat
