#pragma once

#include <array>
#include <cmath>

#include "pwl/error.hpp"

namespace pwl {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
QuadResult gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * kronrod_w[7];
    double rg = fc * gauss_w[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = hl * kronrod_x[i];
        const double s = f(c - dx) + f(c + dx);
        rk += kronrod_w[i] * s;
        if (i % 2 == 1) rg += gauss_w[i / 2] * s;
    }
    return {rk * hl, std::abs((rk - rg) * hl), 15, true};
}

template <class F>
void adapt(F& f, double a, double b, double tol, int depth, int max_depth, QuadResult& acc)
{
    auto r = gk15(f, a, b);
    acc.evaluations += r.evaluations;
    if (r.error <= tol || depth >= max_depth) {
        if (r.error > tol) acc.converged = false;
        acc.value += r.value;
        acc.error += r.error;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, acc);
    adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, acc);
}

} // namespace detail

// Adaptive Gauss-Kronrod 7/15 with recursive bisection.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 60)
{
    QuadResult acc;
    acc.value = 0.0;
    if (a == b) return acc;
    detail::adapt(f, a, b, abs_tol, 0, max_depth, acc);
    return acc;
}

template <class F>
double integrate_or_throw(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 60)
{
    auto r = integrate(f, a, b, abs_tol, max_depth);
    if (!r.converged) throw Error(ErrorCode::QuadratureNonConvergence, "bisection cap reached");
    return r.value;
}

} // namespace pwl
