#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace arcscat {

using Vec2 = std::array<double, 2>;

// Smooth open arc x : [-1,1] -> R^2. Normal convention:
// nu = (x2', -x1') / |x'|; densities absorb the sign, so any consistent
// orientation gives the same scattered field.
struct ArcParametrization {
    std::function<Vec2(double)> position;
    std::function<Vec2(double)> derivative;
    std::string name;

    double jacobian(double t) const {
        const Vec2 d = derivative(t);
        return std::hypot(d[0], d[1]);
    }

    Vec2 normal(double t) const {
        const Vec2 d = derivative(t);
        const double j = std::hypot(d[0], d[1]);
        return {d[1] / j, -d[0] / j};
    }
};

// edge weight w(x(t)) = sqrt(1 - t^2); equals sin(theta) at t = cos(theta)
inline double edge_weight(double t) { return std::sqrt(1.0 - t * t); }

namespace detail {

inline void validate_arc(const ArcParametrization& arc) {
    for (int i = 0; i <= 100; ++i) {
        const double t = -1.0 + 0.02 * i;
        const Vec2 d = arc.derivative(t);
        const double j = std::hypot(d[0], d[1]);
        if (!(j > 1e-12)) throw std::invalid_argument("degenerate parametrization");
        // central-difference consistency of derivative vs position
        const double h = 1e-5;
        const double tl = std::max(t - h, -1.0), tr = std::min(t + h, 1.0);
        const Vec2 pl = arc.position(tl), pr = arc.position(tr);
        const Vec2 fd{(pr[0] - pl[0]) / (tr - tl), (pr[1] - pl[1]) / (tr - tl)};
        const double err = std::hypot(fd[0] - d[0], fd[1] - d[1]);
        if (err > 1e-4 * std::max(1.0, j))
            throw std::invalid_argument("derivative inconsistent with position");
    }
}

}  // namespace detail

inline ArcParametrization make_custom_arc(std::function<Vec2(double)> pos,
                                          std::function<Vec2(double)> deriv,
                                          std::string name = "custom") {
    ArcParametrization arc{std::move(pos), std::move(deriv), std::move(name)};
    detail::validate_arc(arc);
    return arc;
}

inline ArcParametrization make_arc(const std::string& name) {
    if (name == "flat_strip") {
        return make_custom_arc([](double t) -> Vec2 { return {t, 0.0}; },
                               [](double) -> Vec2 { return {1.0, 0.0}; }, name);
    }
    if (name == "spiral") {
        return make_custom_arc(
            [](double t) -> Vec2 {
                const double e = std::exp(t);
                return {e * std::cos(5.0 * t), e * std::sin(5.0 * t)};
            },
            [](double t) -> Vec2 {
                const double e = std::exp(t);
                const double c = std::cos(5.0 * t), s = std::sin(5.0 * t);
                return {e * (c - 5.0 * s), e * (s + 5.0 * c)};
            },
            name);
    }
    if (name == "fish") {
        return make_custom_arc(
            [](double t) -> Vec2 {
                const double r = 1.0 + 0.7 * std::cos(1.6 * M_PI * t);
                return {r * std::cos(0.8 * M_PI * t), r * std::sin(0.8 * M_PI * t)};
            },
            [](double t) -> Vec2 {
                const double r = 1.0 + 0.7 * std::cos(1.6 * M_PI * t);
                const double rp = -0.7 * 1.6 * M_PI * std::sin(1.6 * M_PI * t);
                const double c = std::cos(0.8 * M_PI * t), s = std::sin(0.8 * M_PI * t);
                return {rp * c - 0.8 * M_PI * r * s, rp * s + 0.8 * M_PI * r * c};
            },
            name);
    }
    throw std::invalid_argument("make_arc: unknown arc name '" + name + "'");
}

}  // namespace arcscat
