#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pwl/error.hpp"
#include "pwl/geometry.hpp"
#include "pwl/quadrature.hpp"
#include "pwl/system.hpp"

namespace pwl {

enum class BasisTag { F0, FC0, FC, FRC, FLC, FRS, FLS };

inline const char* to_string(BasisTag t)
{
    switch (t) {
    case BasisTag::F0: return "f0";
    case BasisTag::FC0: return "fC0";
    case BasisTag::FC: return "fC";
    case BasisTag::FRC: return "fRC";
    case BasisTag::FLC: return "fLC";
    case BasisTag::FRS: return "fRS";
    case BasisTag::FLS: return "fLS";
    }
    return "?";
}

struct BasisFunction {
    BasisTag tag = BasisTag::F0;
    double tau = 0.0;
    int mu = 0;

    bool saddle_type() const { return tag == BasisTag::FRS || tag == BasisTag::FLS; }
    bool center_type() const { return tag == BasisTag::FRC || tag == BasisTag::FLC; }
};

template <class T>
T center_angle(double tau, int mu, T h)
{
    using std::acos;
    const T t2 = T(tau) * T(tau), h2 = h * h;
    return T(2) * std::numbers::pi_v<T> * T(mu) + T(mu ? -1 : 1) * acos((t2 - h2) / (t2 + h2));
}

// Raw formula, no domain check. Instantiated with long double where the
// series remainder near h = 1 needs the extra digits.
template <class T>
T basis_value(const BasisFunction& b, T h)
{
    using std::log;
    const T one(1), tau(b.tau);
    switch (b.tag) {
    case BasisTag::F0: return h;
    case BasisTag::FC0: return (h * h - one) * log((h + one) / (h - one));
    case BasisTag::FC: return (h * h - one) * log((h + one) / (one - h));
    case BasisTag::FRS:
    case BasisTag::FLS: return (h * h - tau * tau) * log((h + tau) / (tau - h));
    case BasisTag::FRC:
    case BasisTag::FLC: return (h * h + tau * tau) * center_angle(b.tau, b.mu, h);
    }
    return T(0);
}

inline bool in_basis_domain(const BasisFunction& b, double h)
{
    switch (b.tag) {
    case BasisTag::F0: return true;
    case BasisTag::FC0: return h > 1.0;
    case BasisTag::FC: return h > 0.0 && h < 1.0;
    case BasisTag::FRS:
    case BasisTag::FLS: return h > 0.0 && h < b.tau;
    case BasisTag::FRC:
    case BasisTag::FLC: return h > 0.0;
    }
    return false;
}

inline double basis_eval(const BasisFunction& b, double h)
{
    if (!in_basis_domain(b, h))
        throw Error(ErrorCode::DomainError, std::string("h outside the domain of ") + to_string(b.tag));
    return basis_value(b, h);
}

struct Term {
    double k = 0.0;
    BasisFunction basis;
};

struct MelnikovForm {
    int which = 0;
    std::vector<Term> terms;
    Interval domain;

    double operator()(double h) const
    {
        if (!domain.contains(h)) throw Error(ErrorCode::DomainError, "h outside the Melnikov domain");
        return value(h);
    }
    // No domain check, so points within rounding distance of h = 1 are usable.
    template <class T = double>
    T value(T h) const
    {
        T acc(0);
        for (const auto& t : terms)
            if (t.k != 0.0) acc += T(t.k) * basis_value(t.basis, h);
        return acc;
    }
};

inline BasisFunction outer_basis(const OuterConstants& o, Side side)
{
    if (o.saddle()) return {side == Side::Right ? BasisTag::FRS : BasisTag::FLS, o.tau, 0};
    return {side == Side::Right ? BasisTag::FRC : BasisTag::FLC, o.tau, o.mu};
}

// Basis lists in the order of the closed-form theorems.
inline std::vector<BasisFunction> melnikov_basis(const SystemSpec& s, int which)
{
    const auto R = outer_basis(outer_constants(s.right, Side::Right), Side::Right);
    const auto L = outer_basis(outer_constants(s.left, Side::Left), Side::Left);
    switch (which) {
    case 0: return {{BasisTag::F0}, {BasisTag::FC0}, R, L};
    case 1: return {{BasisTag::F0}, {BasisTag::FC}, R};
    case 2: return {{BasisTag::F0}, {BasisTag::FC}, L};
    }
    throw Error(ErrorCode::DomainError, "which must be 0, 1 or 2");
}

inline Interval melnikov_domain(const SystemSpec& s, int which)
{
    return annulus_interval(derive_constants(s), which);
}

// Line integral of g dx - f dy along one unperturbed arc.
inline double arc_integral(const SystemSpec& s, const PerturbationCoeffs& P, Arc arc, double h, double abs_tol = 1e-10)
{
    const ZoneArc za = make_arc(s, arc, h);
    double f1, f2, f3, g1, g2, g3;
    switch (za.zone) {
    case Zone::Right:
        f1 = P[Coef::p10], f2 = P[Coef::p01], f3 = P[Coef::p00];
        g1 = P[Coef::q10], g2 = P[Coef::q01], g3 = P[Coef::q00];
        break;
    case Zone::Left:
        f1 = P[Coef::r10], f2 = P[Coef::r01], f3 = P[Coef::r00];
        g1 = P[Coef::s10], g2 = P[Coef::s01], g3 = P[Coef::s00];
        break;
    default:
        f1 = P[Coef::u10], f2 = P[Coef::u01], f3 = P[Coef::u00];
        g1 = P[Coef::v10], g2 = P[Coef::v01], g3 = P[Coef::v00];
        break;
    }
    auto integrand = [&](double t) {
        const Point z = za.at(t);
        const Point dz = za.lin.field(z);
        return (g1 * z.x + g2 * z.y + g3) * dz.x - (f1 * z.x + f2 * z.y + f3) * dz.y;
    };
    return integrate_or_throw(integrand, 0.0, za.duration, abs_tol);
}

inline double quadrature_M(const SystemSpec& s, const PerturbationCoeffs& P, int which, double h)
{
    if (!melnikov_domain(s, which).contains(h)) throw Error(ErrorCode::DomainError, "h outside the annulus");
    const double bR = s.right.b, bL = s.left.b;
    switch (which) {
    case 0:
        return bR * arc_integral(s, P, Arc::A3A, h) + bR / bL * arc_integral(s, P, Arc::A2A3, h) +
               bR * arc_integral(s, P, Arc::A1A2, h) + arc_integral(s, P, Arc::AA1, h);
    case 1:
        return bR * arc_integral(s, P, Arc::B1B, h) + arc_integral(s, P, Arc::BB1, h);
    case 2:
        return arc_integral(s, P, Arc::C1C, h) / bL + arc_integral(s, P, Arc::CC1, h);
    }
    throw Error(ErrorCode::DomainError, "which must be 0, 1 or 2");
}

inline double quadrature_M(const SystemSpec& s, int which, double h)
{
    return quadrature_M(s, s.perturbation, which, h);
}

inline double hamiltonian_y(const SystemSpec& s, Zone z, Point p)
{
    switch (z) {
    case Zone::Right: return s.right.b * p.y + s.right.a * p.x - s.right.a;
    case Zone::Left: return s.left.b * p.y + s.left.a * p.x + s.left.a;
    case Zone::Center: break;
    }
    return p.y;
}

// Arc weights built from H_y ratios at the crossing points, in the arc order
// A3A, A2A3, A1A2, AA1 / B1B, BB1 / C1C, CC1.
inline std::vector<double> crossing_weights(const SystemSpec& s, int which, double h)
{
    auto Hy = [&](Zone z, Point p) { return hamiltonian_y(s, z, p); };
    const Point A{1, h}, A1{1, -h}, A2{-1, -h}, A3{-1, h};
    if (which == 0) {
        const double w1 = Hy(Zone::Right, A) / Hy(Zone::Center, A);
        const double w2 = w1 * Hy(Zone::Center, A3) / Hy(Zone::Left, A3);
        const double w3 = w2 * Hy(Zone::Left, A2) / Hy(Zone::Center, A2);
        const double w4 = w3 * Hy(Zone::Center, A1) / Hy(Zone::Right, A1);
        return {w1, w2, w3, w4};
    }
    if (which == 1) {
        const double w1 = Hy(Zone::Right, A) / Hy(Zone::Center, A);
        return {w1, w1 * Hy(Zone::Center, A1) / Hy(Zone::Right, A1)};
    }
    const Point C{-1, h}, C1{-1, -h};
    const double w1 = Hy(Zone::Center, C) / Hy(Zone::Left, C);
    return {w1, w1 * Hy(Zone::Left, C1) / Hy(Zone::Center, C1)};
}

namespace detail {

inline std::array<MelnikovForm, 3> sss_closed_form(const SystemSpec& s)
{
    const auto& P = s.perturbation;
    const auto R = outer_constants(s.right, Side::Right);
    const auto L = outer_constants(s.left, Side::Left);
    const double bR = s.right.b, bL = s.left.b;
    const double wR = R.omega, tR = R.tau, wL = L.omega, tL = L.tau;
    const double Pp = P[Coef::p10] + P[Coef::q01];
    const double Rr = P[Coef::r10] + P[Coef::s01];

    const double a1 = (2 * (P[Coef::p00] + P[Coef::p10]) * wR + bR * Pp * tR) / wR;
    const double a2 = bR / (2 * wR) * Pp;
    const double a3 = P[Coef::v01] - P[Coef::u10];
    const double a4 = 0.5 * (P[Coef::u10] + P[Coef::v01]);
    const double a5 = (2 * (P[Coef::r10] - P[Coef::r00]) * wL + bL * Rr * tL) / wL;
    const double a6 = bL / (2 * wL) * Rr;
    const double a7 = -2 * P[Coef::u00] - P[Coef::u10] + P[Coef::v01];
    const double a8 = 2 * P[Coef::u00] - P[Coef::u10] + P[Coef::v01];

    const BasisFunction fR{BasisTag::FRS, tR, 0}, fL{BasisTag::FLS, tL, 0};
    const auto d = derive_constants(s);
    std::array<MelnikovForm, 3> out;
    out[0].which = 0;
    out[0].domain = d.J0;
    out[0].terms = {{a1 + 2 * bR * a3 + bR / bL * a5, {BasisTag::F0}}, {2 * bR * a4, {BasisTag::FC0}}};
    // Kept as two terms even when tau_R = tau_L, so M0 always has four.
    out[0].terms.push_back({a2, fR});
    out[0].terms.push_back({bR / bL * a6, fL});
    out[1].which = 1;
    out[1].domain = d.J1;
    out[1].terms = {{a1 + bR * a7, {BasisTag::F0}}, {bR * a4, {BasisTag::FC}}, {a2, fR}};
    out[2].which = 2;
    out[2].domain = d.J2;
    out[2].terms = {{a5 / bL + a8, {BasisTag::F0}}, {a4, {BasisTag::FC}}, {a6 / bL, fL}};
    return out;
}

inline std::vector<double> fit_samples(const Interval& J, int which, int n)
{
    double lo, hi;
    if (which == 0) {
        lo = 1.002;
        hi = std::isfinite(J.hi) ? J.hi - 0.002 * std::max(1.0, J.hi - 1.0) : 4.0;
        hi = std::min(hi, 4.0);
    } else {
        lo = 0.002;
        hi = 0.998;
    }
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i) {
        const double c = 0.5 * (1 - std::cos(std::numbers::pi * (i + 0.5) / n));
        hs[i] = lo + (hi - lo) * c;
    }
    return hs;
}

} // namespace detail

struct FitDiagnostics {
    std::array<double, 3> residual{};
};

// Coefficients k for classes without printed closed forms, by least squares
// against the line-integral quadrature.
inline MelnikovForm fit_melnikov_form(const SystemSpec& s, const PerturbationCoeffs& P, int which,
                                      double* residual_out = nullptr, int samples = 12)
{
    const auto basis = melnikov_basis(s, which);
    const auto J = melnikov_domain(s, which);
    const auto hs = detail::fit_samples(J, which, samples);
    const int n = static_cast<int>(basis.size());
    Eigen::MatrixXd A(samples, n);
    Eigen::VectorXd y(samples);
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) = basis_eval(basis[j], hs[i]);
        y(i) = quadrature_M(s, P, which, hs[i]);
    }
    // Data at the quadrature noise floor means M vanishes identically; fitting
    // it would turn rounding into spurious sign changes.
    double pscale = 0.0;
    for (double c : P.v) pscale = std::max(pscale, std::abs(c));
    const bool null = y.cwiseAbs().maxCoeff() <= 1e-10 * pscale;
    Eigen::VectorXd k = null ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(A.colPivHouseholderQr().solve(y));
    const double res = (A * k - y).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    if (residual_out) *residual_out = res;
    if (!(res < 1e-8 * scale))
        throw Error(ErrorCode::FitResidualTooLarge, "basis fit residual " + std::to_string(res));
    MelnikovForm f;
    f.which = which;
    f.domain = J;
    for (int j = 0; j < n; ++j) f.terms.push_back({k(j), basis[j]});
    return f;
}

inline bool is_sss(const SystemSpec& s)
{
    return s.right.discriminant() > 0.0 && s.left.discriminant() > 0.0;
}

inline std::array<MelnikovForm, 3> closed_form_M(const SystemSpec& s, FitDiagnostics* diag = nullptr)
{
    derive_constants(s);
    if (is_sss(s)) return detail::sss_closed_form(s);
    std::array<MelnikovForm, 3> out;
    for (int w = 0; w < 3; ++w) {
        double r = 0.0;
        out[w] = fit_melnikov_form(s, s.perturbation, w, &r);
        if (diag) diag->residual[w] = r;
    }
    return out;
}

} // namespace pwl
