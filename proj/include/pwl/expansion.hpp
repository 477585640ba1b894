#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pwl/error.hpp"
#include "pwl/melnikov.hpp"
#include "pwl/system.hpp"

namespace pwl {

// M(h) ~ sum C[j] x^j + (D[0] x + D[1] x^2) log|x|, x = h - 1.
struct ExpansionAtOne {
    int which = 0;
    std::vector<double> C;
    std::array<double, 2> D{};
    int side = 1; // +1: h > 1, -1: h < 1

    template <class T = double>
    T series(T h) const
    {
        using std::abs;
        using std::log;
        const T x = h - T(1);
        T acc(0), p(1);
        for (double c : C) {
            acc += T(c) * p;
            p *= x;
        }
        const T lg = log(abs(x));
        return acc + (T(D[0]) * x + T(D[1]) * x * x) * lg;
    }
};

// Two readings of the printed coefficient lists. They differ only for real
// centers (mu = 1): the derivative of (h^2 + tau^2) arccos(...) at h = 1
// contributes a factor |tau| * (-1)^mu, which the printed lists carry as
// (-1)^mu tau. Published keeps that reading, Corrected uses the exact one.
enum class TableConvention { Corrected, Published };

inline const char* to_string(TableConvention c)
{
    return c == TableConvention::Corrected ? "corrected" : "published";
}

// Exact coefficients of a basis combination: sum c[j] x^j + (d[0] x + d[1] x^2) log|x|.
// Long double instances keep the remainder measurable down to |x| ~ 1e-6.
template <class T = double>
struct SeriesCoefficients {
    std::array<T, 4> c{};
    std::array<T, 2> d{};

    T operator()(T h, int n = 4) const
    {
        using std::abs;
        using std::log;
        const T x = h - T(1);
        T acc(0), p(1);
        for (int j = 0; j < n; ++j) {
            acc += c[j] * p;
            p *= x;
        }
        return acc + (d[0] * x + d[1] * x * x) * log(abs(x));
    }
};

namespace detail {

// Leibniz rule for g * l at h = 1, given g, g', g'' (g''' = 0) and l..l'''.
template <class T>
std::array<T, 4> product_series(std::array<T, 3> g, std::array<T, 4> l)
{
    return {g[0] * l[0], g[1] * l[0] + g[0] * l[1], (g[2] * l[0] + 2 * g[1] * l[1] + g[0] * l[2]) / 2,
            (3 * g[2] * l[1] + 3 * g[1] * l[2] + g[0] * l[3]) / 6};
}

template <class T = double>
SeriesCoefficients<T> basis_series(const BasisFunction& b)
{
    using std::abs;
    using std::atan;
    using std::log;
    const T L2 = std::numbers::ln2_v<T>, pi = std::numbers::pi_v<T>;
    SeriesCoefficients<T> s;
    switch (b.tag) {
    case BasisTag::F0: s.c = {1, 1, 0, 0}; break;
    case BasisTag::FC0:
    case BasisTag::FC:
        // (h^2 - 1) log(h + 1) plus the log|h - 1| part -(2x + x^2).
        s.c = {0, 2 * L2, 1 + L2, T(0.25)};
        s.d = {-2, -1};
        break;
    case BasisTag::FRS:
    case BasisTag::FLS: {
        const T t = b.tau, p = t + 1, m = t - 1;
        s.c = product_series<T>({1 - t * t, 2, 2},
                                {log(p / m), 1 / p + 1 / m, -1 / (p * p) + 1 / (m * m),
                                 2 / (p * p * p) + 2 / (m * m * m)});
        break;
    }
    case BasisTag::FRC:
    case BasisTag::FLC: {
        const T a = abs(T(b.tau)), sg = b.mu ? -1 : 1, q = a * a + 1;
        const T th = 2 * pi * b.mu + sg * 2 * atan(1 / a);
        s.c = product_series<T>({1 + a * a, 2, 2},
                                {th, sg * 2 * a / q, sg * -4 * a / (q * q), sg * (12 * a - 4 * a * a * a) / (q * q * q)});
        break;
    }
    }
    return s;
}

} // namespace detail

template <class T = double>
SeriesCoefficients<T> series_coefficients(const MelnikovForm& f)
{
    SeriesCoefficients<T> out;
    for (const auto& t : f.terms) {
        const auto s = detail::basis_series<T>(t.basis);
        for (int j = 0; j < 4; ++j) out.c[j] += T(t.k) * s.c[j];
        out.d[0] += T(t.k) * s.d[0];
        out.d[1] += T(t.k) * s.d[1];
    }
    return out;
}

// Exact expansion of a basis combination, C up to order n - 1 (n <= 4).
inline ExpansionAtOne series_expansion(const MelnikovForm& f, int n)
{
    const auto s = series_coefficients(f);
    ExpansionAtOne e;
    e.which = f.which;
    e.side = f.which == 0 ? 1 : -1;
    e.C.assign(s.c.begin(), s.c.begin() + n);
    e.D = s.d;
    return e;
}

using CoefficientTable = std::array<std::vector<double>, 3>;

// Printed coefficient lists for the class of the normalized system.
inline CoefficientTable printed_coefficients(const SystemSpec& s, TableConvention conv)
{
    using std::numbers::pi;
    const auto d = derive_constants(s);
    if (d.reflected) throw Error(ErrorCode::ClassMismatch, "coefficient lists need the normalized orientation");
    const auto& g = s.perturbation;
    const double bR = s.right.b, bL = s.left.b;
    const double p00 = g[Coef::p00], p10 = g[Coef::p10], u00 = g[Coef::u00], u10 = g[Coef::u10];
    const double v01 = g[Coef::v01], r00 = g[Coef::r00], r10 = g[Coef::r10];
    const double Pp = p10 + g[Coef::q01], R = r10 + g[Coef::s01], W = u10 + v01;
    const double wR = d.right.omega, tR = d.right.tau, wL = d.left.omega, tL = d.left.tau;
    const int m1 = d.right.mu, m2 = d.left.mu;
    const double s1 = m1 ? -1.0 : 1.0, s2 = m2 ? -1.0 : 1.0;
    const bool pub = conv == TableConvention::Published;
    const double dR = pub ? s1 * tR : tR, dL = pub ? s2 * tL : tL;
    const double L2 = std::numbers::ln2, L4 = 2 * L2;
    const bool rs = d.right.saddle(), ls = d.left.saddle();
    const double LR = rs ? std::log((tR + 1) / (tR - 1)) : 0.0;
    const double LL = ls ? std::log((tL + 1) / (tL - 1)) : 0.0;
    const double AR = rs ? 0.0 : std::acos((tR * tR - 1) / (tR * tR + 1));
    const double AL = ls ? 0.0 : std::acos((tL * tL - 1) / (tL * tL + 1));
    const double tR2 = tR * tR, tL2 = tL * tL;
    const double pp = p00 + p10, rr = r10 - r00;

    CoefficientTable T;
    if (rs) {
        T[1] = {2 * pp + bR * (v01 - 2 * u00 - u10) + bR * tR / wR * Pp - bR / (2 * wR) * Pp * (tR2 - 1) * LR,
                2 * pp + bR * (v01 - 2 * u00 - u10 + W * L2) + bR / wR * Pp * LR,
                bR / 2 * (2 * tR / (wR * (tR2 - 1)) * Pp + W * (1 + L2) + Pp * LR / wR)};
    } else {
        T[1] = {(4 * pp * wR - 2 * bR * (2 * u00 + u10 - v01) * wR + 2 * bR * Pp * (pi * m1 * (1 + tR2) - tR) +
                 s1 * bR * Pp * (1 + tR2) * AR) /
                    (2 * wR),
                (2 * pp * wR + bR * Pp * (2 * pi * m1 + dR - tR) + s1 * bR * Pp * AR +
                 bR * wR * (v01 - 2 * u00 - u10 + W * L2)) /
                    wR,
                bR / (2 * wR * (tR2 + 1)) *
                    (Pp * (2 * dR + s1 * (1 + tR2) * AR) + (1 + tR2) * (2 * pi * Pp * m1 + W * wR * (1 + L2)))};
    }
    const double c2 = 2 / bL * rr + 2 * u00 - u10 + v01;
    if (ls) {
        T[2] = {c2 + tL / wL * R - 1 / (2 * wL) * R * (tL2 - 1) * LL, c2 + W * L2 + R * LL / wL,
                0.5 * (2 * tL / (wL * (tL2 - 1)) * R + W * (1 + L2) + R * LL / wL)};
    } else {
        T[2] = {c2 + R * (pi * m2 * (1 + tL2) - tL) / wL + s2 * (tL2 + 1) / (2 * wL) * R * AL,
                c2 + R * (2 * pi * m2 + dL - tL) / wL + s2 / wL * R * AL + W * L2,
                0.5 * (2 / wL * R * (pi * m2 + dL / (tL2 + 1)) + s2 / wL * R * AL + W * (1 + L2))};
    }

    if (rs && ls) {
        const double base = 2 * bR / bL * rr + 2 * (pp - bR * u10 + bR * v01);
        T[0] = {base + bR * tL / wL * R + bR * tR / wR * Pp - bR / (2 * wL) * R * (tL2 - 1) * LL -
                    bR / (2 * wR) * Pp * (tR2 - 1) * LR,
                base + bR * W * L4 + bR / wL * R * LL + bR / wR * Pp * LR,
                bR / 2 *
                    (2 * u10 + 2 * (v01 + tL / (wL * (tL2 - 1)) * R + tR / (wR * (tR2 - 1)) * Pp) + W * L4 +
                     R * LL / wL + Pp * LR / wR)};
    } else if (rs) {
        const double c3L = pub ? s2 * tL * tL * tL : tL * tL * tL;
        T[0] = {2 * pp + 2 * bR / bL * rr +
                    bR * (2 * v01 - 2 * u10 + R * (pi * m2 * (1 + tL2) - tL) / wL + tR / wR * Pp) +
                    s2 * bR / (2 * wL) * R * (tL2 + 1) * AL - bR / (2 * wR) * Pp * (tR2 - 1) * LR,
                2 * pp + s2 * bR / wL * R * AL +
                    bR * (2 / bL * rr + R * (2 * pi * m2 + dL - tL) / wL + u10 * (L4 - 2) + v01 * (2 + L4)) +
                    bR / wR * Pp * LR,
                bR / (2 * wL * wR) *
                    (2 * (pi * R * m2 * wR + W * wL * wR + dL * wR / (tL2 + 1) * R + tR * wL / (tR2 - 1) * Pp) +
                     s2 * R * wR * AL + W * wL * wR * L4 + Pp * wL * LR),
                bR / 12 *
                    (3 * W + 8 * c3L / (wL * (tL2 + 1) * (tL2 + 1)) * R +
                     8 * tR * tR * tR / (wR * (tR2 - 1) * (tR2 - 1)) * Pp)};
    } else {
        const double c3L = pub ? s2 * tL * tL * tL : tL * tL * tL;
        const double c3R = pub ? s1 * tR * tR * tR : tR * tR * tR;
        T[0] = {0.5 * (4 * pp + 2 * bR * (2 / bL * rr + 2 * (v01 - u10) + R * (pi * m2 * (1 + tL2) - tL) / wL) +
                       2 * bR / wR * Pp * (pi * m1 * (1 + tR2) - tR) + s2 * bR / wL * R * (tL2 + 1) * AL +
                       s1 * bR / wR * Pp * (tR2 + 1) * AR),
                (wL * wR * (2 * bL * pp + 2 * bR * rr + 2 * bL * bR * (v01 - u10)) +
                 bL * bR * (2 * pi * R * m2 * wR + (dL - tL) * wR * R + Pp * wL * (2 * pi * m1 + dR - tR)) +
                 bL * bR * (s2 * R * wR * AL + s1 * Pp * wL * AR + W * wL * wR * L4)) /
                    (bL * wL * wR),
                bR / 2 *
                    (2 * u10 +
                     2 * (v01 + pi * Pp * m1 / wR + pi * R * m2 / wL + dL / (wL * (tL2 + 1)) * R +
                          dR / (wR * (tR2 + 1)) * Pp) +
                     s2 / wL * R * AL + s1 / wR * Pp * AR + W * L4),
                bR / 12 *
                    (3 * W + 8 * c3L / (wL * (tL2 + 1) * (tL2 + 1)) * R +
                     8 * c3R / (wR * (tR2 + 1) * (tR2 + 1)) * Pp)};
    }
    return T;
}

// Least-squares recovery of the log coefficients with C held fixed. The
// columns beyond D absorb the next orders of the remainder.
inline std::array<double, 2> fit_log_coefficients(const MelnikovForm& f, const std::vector<double>& C, int side,
                                                  double* residual_out = nullptr)
{
    constexpr int n = 40;
    const int m = static_cast<int>(C.size());
    Eigen::MatrixXd A(n, 5);
    Eigen::VectorXd y(n);
    ExpansionAtOne poly;
    poly.C = C;
    for (int i = 0; i < n; ++i) {
        const long double x = side * std::exp2(-(8.0L + 10.0L * i / (n - 1)));
        const long double h = 1.0L + x;
        const long double lg = std::log(std::abs(x));
        y(i) = static_cast<double>(f.value<long double>(h) - poly.series<long double>(h));
        const long double xm = std::pow(x, static_cast<long double>(m));
        const long double row[5] = {x * lg, x * x * lg, xm, xm * lg, xm * x};
        for (int j = 0; j < 5; ++j) A(i, j) = static_cast<double>(row[j]);
    }
    // Column scaling keeps the normal equations well conditioned.
    Eigen::VectorXd sc = A.colwise().norm().transpose();
    for (int j = 0; j < 5; ++j)
        if (sc(j) > 0) A.col(j) /= sc(j);
    Eigen::VectorXd z = A.colPivHouseholderQr().solve(y);
    const double res = (A * z - y).cwiseAbs().maxCoeff();
    if (residual_out) *residual_out = res;
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    if (!(res < 1e-7 * scale)) throw Error(ErrorCode::FitResidualTooLarge, "log-coefficient fit residual too large");
    return {z(0) / sc(0), z(1) / sc(1)};
}

struct Expansion {
    std::array<ExpansionAtOne, 3> M;
    SystemClass cls = SystemClass::SSS;
    bool reflected = false;
    TableConvention convention = TableConvention::Corrected;
};

// C from the printed lists, D by fitting. Works on the normalized system.
inline Expansion expand_at_one(const SystemSpec& input, TableConvention conv = TableConvention::Corrected,
                               std::optional<SystemClass> expected = std::nullopt)
{
    const auto n = normalize(input);
    const auto d = derive_constants(n.spec);
    if (expected && *expected != d.cls)
        throw Error(ErrorCode::ClassMismatch, std::string("system is ") + to_string(d.cls));
    const auto forms = closed_form_M(n.spec);
    const auto printed = printed_coefficients(n.spec, conv);
    const auto exact = conv == TableConvention::Corrected ? printed
                                                          : printed_coefficients(n.spec, TableConvention::Corrected);
    Expansion out;
    out.cls = d.cls;
    out.reflected = n.reflected;
    out.convention = conv;
    for (int w = 0; w < 3; ++w) {
        auto& e = out.M[w];
        e.which = w;
        e.side = w == 0 ? 1 : -1;
        e.C = printed[w];
        e.D = fit_log_coefficients(forms[w], exact[w], e.side);
    }
    return out;
}

// The five parameters solved for by the vanishing assignment.
inline constexpr std::array<Coef, 5> free_coefs = {Coef::p00, Coef::u10, Coef::p10, Coef::r00, Coef::r10};

// Assignment making C1^0..C1^2 and C2^0..C2^2 vanish, given q01, s01, u00, v01.
inline PerturbationCoeffs vanishing_params(const SystemSpec& input, double q01, double s01, double u00, double v01)
{
    const auto n = normalize(input);
    derive_constants(n.spec);
    const double bR = n.spec.right.b, bL = n.spec.left.b;
    PerturbationCoeffs P;
    P[Coef::q01] = q01;
    P[Coef::s01] = s01;
    P[Coef::u00] = u00;
    P[Coef::v01] = v01;
    P[Coef::p10] = -q01;
    P[Coef::r10] = -s01;
    P[Coef::u10] = -v01;
    P[Coef::p00] = q01 + bR * (u00 - v01);
    P[Coef::r00] = P[Coef::r10] + bL * (u00 + v01);
    return P;
}

// Rows C1^0, C1^1, C1^2, C2^0, C2^1, C2^2; columns p00, u10, p10, r00, r10.
// The lists are linear in the coefficients, so unit columns give the exact map.
inline Eigen::Matrix<double, 6, 5> coefficient_jacobian(const SystemSpec& input, TableConvention conv)
{
    auto s = normalize(input).spec;
    Eigen::Matrix<double, 6, 5> J;
    for (int j = 0; j < 5; ++j) {
        s.perturbation = PerturbationCoeffs::unit(free_coefs[j]);
        const auto T = printed_coefficients(s, conv);
        for (int i = 0; i < 3; ++i) {
            J(i, j) = T[1][i];
            J(i + 3, j) = T[2][i];
        }
    }
    return J;
}

inline int numerical_rank(const Eigen::MatrixXd& M, double rel = 1e-10)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rel * sv(0)) ++r;
    return r;
}

inline int rank_at(const SystemSpec& s, TableConvention conv = TableConvention::Corrected)
{
    return numerical_rank(coefficient_jacobian(s, conv).topRows<5>());
}

inline double phi_lambda_ratio(double tau)
{
    const double L = std::log((tau + 1) / (tau - 1)), l2 = std::numbers::ln2, l4 = 2 * l2, t2 = tau * tau;
    const double lam1 = (t2 - 1) * ((t2 + 1) * L - 2 * tau);
    const double lam2 = tau * (2 - l4 - t2 * (2 + l4)) + (l2 - 1 + t2 * t2 * (1 + l2) - t2 * l4) * L;
    return lam1 / lam2;
}

struct AlphaRelation {
    // alpha_1^0, alpha_1^1, alpha_1^2, alpha_2^0, alpha_2^1
    std::array<double, 5> alpha{};
    // phi(tau_R) / phi(tau_L), SSS only. Equals alpha_1^2 when b_R = 1; in
    // general alpha_1^2 = phi_ratio / b_R.
    std::optional<double> phi_ratio;
    TableConvention convention = TableConvention::Corrected;

    double a12() const { return alpha[2]; }
};

// C2^2 = a10 C1^0 + a11 C1^1 + a12 C1^2 + a20 C2^0 + a21 C2^1.
inline AlphaRelation alpha_relation(const SystemSpec& input, TableConvention conv = TableConvention::Corrected)
{
    const auto J = coefficient_jacobian(input, conv);
    const Eigen::Matrix<double, 5, 5> A = J.topRows<5>();
    if (numerical_rank(A) < 5) throw Error(ErrorCode::RankDeficient, "coefficient Jacobian has rank < 5");
    const Eigen::Matrix<double, 5, 1> g = J.row(5).transpose();
    const Eigen::Matrix<double, 5, 1> a = A.transpose().fullPivLu().solve(g);
    AlphaRelation out;
    out.convention = conv;
    for (int i = 0; i < 5; ++i) out.alpha[i] = a(i);
    const auto d = derive_constants(input);
    if (d.cls == SystemClass::SSS) out.phi_ratio = phi_lambda_ratio(d.tau_R()) / phi_lambda_ratio(d.tau_L());
    return out;
}

} // namespace pwl
