#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pwl/error.hpp"

namespace pwl {

enum class Side { Left, Right };

// Outer-zone Hamiltonian parameters. The central zone is fixed to
// H^C = y^2/2 - x^2/2.
struct ZoneParams {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double beta = 0.0;

    double discriminant() const { return a * a + b * c; }
    bool operator==(const ZoneParams&) const = default;
};

enum class Coef {
    r10, r01, r00, s10, s01, s00,
    u10, u01, u00, v10, v01, v00,
    p10, p01, p00, q10, q01, q00
};

inline constexpr std::array<const char*, 18> coef_names = {
    "r10", "r01", "r00", "s10", "s01", "s00",
    "u10", "u01", "u00", "v10", "v01", "v00",
    "p10", "p01", "p00", "q10", "q01", "q00"};

// Coefficients whose contribution to every line integral cancels.
inline constexpr std::array<Coef, 6> inert_coefs = {
    Coef::r01, Coef::s10, Coef::u01, Coef::v10, Coef::p01, Coef::q10};

// f_L = r10 x + r01 y + r00, g_L = s10 x + s01 y + s00 (left),
// u, v for the central zone and p, q for the right zone.
struct PerturbationCoeffs {
    std::array<double, 18> v{};

    double& operator[](Coef c) { return v[static_cast<std::size_t>(c)]; }
    double operator[](Coef c) const { return v[static_cast<std::size_t>(c)]; }

    PerturbationCoeffs& operator+=(const PerturbationCoeffs& o)
    {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    friend PerturbationCoeffs operator*(double s, PerturbationCoeffs p)
    {
        for (auto& x : p.v) x *= s;
        return p;
    }
    friend PerturbationCoeffs operator+(PerturbationCoeffs a, const PerturbationCoeffs& b)
    {
        a += b;
        return a;
    }
    bool operator==(const PerturbationCoeffs&) const = default;

    static PerturbationCoeffs unit(Coef c)
    {
        PerturbationCoeffs p;
        p[c] = 1.0;
        return p;
    }
};

struct SystemSpec {
    ZoneParams left;
    ZoneParams right;
    PerturbationCoeffs perturbation;

    bool operator==(const SystemSpec&) const = default;
};

enum class ZoneKind { SaddleReal, SaddleVirtual, SaddleBoundary, CenterReal, CenterVirtual, CenterBoundary };

inline const char* to_string(ZoneKind k)
{
    switch (k) {
    case ZoneKind::SaddleReal: return "SaddleReal";
    case ZoneKind::SaddleVirtual: return "SaddleVirtual";
    case ZoneKind::SaddleBoundary: return "SaddleBoundary";
    case ZoneKind::CenterReal: return "CenterReal";
    case ZoneKind::CenterVirtual: return "CenterVirtual";
    case ZoneKind::CenterBoundary: return "CenterBoundary";
    }
    return "?";
}

inline bool is_saddle(ZoneKind k)
{
    return k == ZoneKind::SaddleReal || k == ZoneKind::SaddleVirtual || k == ZoneKind::SaddleBoundary;
}

// Abscissa of the equilibrium of the zone's linear field, extended to the plane.
inline double singular_abscissa(const ZoneParams& z, Side side)
{
    const double d = z.discriminant();
    if (d == 0.0) throw Error(ErrorCode::DegenerateZone, "a^2 + b c = 0");
    if (side == Side::Right) return (z.a * z.a - z.b * z.beta) / d;
    return -(z.a * z.a + z.b * z.beta) / d;
}

inline ZoneKind classify_zone(const ZoneParams& z, Side side)
{
    const double px = singular_abscissa(z, side);
    const bool saddle = z.discriminant() > 0.0;
    const double off = side == Side::Right ? px - 1.0 : -1.0 - px;
    constexpr double tol = 1e-12;
    if (std::abs(off) <= tol) return saddle ? ZoneKind::SaddleBoundary : ZoneKind::CenterBoundary;
    if (off > 0.0) return saddle ? ZoneKind::SaddleReal : ZoneKind::CenterReal;
    return saddle ? ZoneKind::SaddleVirtual : ZoneKind::CenterVirtual;
}

enum class SystemClass { SSS, CSS, CSC };

inline const char* to_string(SystemClass c)
{
    switch (c) {
    case SystemClass::SSS: return "SSS";
    case SystemClass::CSS: return "CSS";
    case SystemClass::CSC: return "CSC";
    }
    return "?";
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double h) const { return h > lo && h < hi; }
    bool empty() const { return !(hi > lo); }
};

struct OuterConstants {
    ZoneKind kind = ZoneKind::SaddleReal;
    double omega = 0.0;
    double tau = 0.0;
    int mu = 0;

    bool saddle() const { return is_saddle(kind); }
};

inline OuterConstants outer_constants(const ZoneParams& z, Side side)
{
    OuterConstants o;
    o.kind = classify_zone(z, side);
    const double d = z.discriminant();
    const double sb = side == Side::Right ? -z.b * z.beta : z.b * z.beta;
    if (d > 0.0) {
        o.omega = std::sqrt(d);
        o.tau = (z.a * z.a + sb - o.omega * o.omega) / (z.b * o.omega);
    } else {
        o.omega = std::sqrt(-d);
        o.tau = (z.a * z.a + sb + o.omega * o.omega) / (z.b * o.omega);
        o.mu = o.kind == ZoneKind::CenterReal ? 1 : 0;
    }
    return o;
}

struct DerivedConstants {
    OuterConstants right;
    OuterConstants left;
    SystemClass cls = SystemClass::SSS;
    Interval J0, J1, J2;
    bool reflected = false;

    double omega_R() const { return right.omega; }
    double omega_L() const { return left.omega; }
    double tau_R() const { return right.tau; }
    double tau_L() const { return left.tau; }
    int mu1() const { return right.mu; }
    int mu2() const { return left.mu; }
};

// Rotation by pi, (x, y) -> (-x, -y); exchanges the outer zones.
inline SystemSpec reflect(const SystemSpec& s)
{
    SystemSpec r;
    r.right = {s.left.a, s.left.b, s.left.c, -s.left.beta};
    r.left = {s.right.a, s.right.b, s.right.c, -s.right.beta};
    const auto& P = s.perturbation;
    auto& Q = r.perturbation;
    Q[Coef::p10] = P[Coef::r10];
    Q[Coef::p01] = P[Coef::r01];
    Q[Coef::p00] = -P[Coef::r00];
    Q[Coef::q10] = P[Coef::s10];
    Q[Coef::q01] = P[Coef::s01];
    Q[Coef::q00] = -P[Coef::s00];
    Q[Coef::r10] = P[Coef::p10];
    Q[Coef::r01] = P[Coef::p01];
    Q[Coef::r00] = -P[Coef::p00];
    Q[Coef::s10] = P[Coef::q10];
    Q[Coef::s01] = P[Coef::q01];
    Q[Coef::s00] = -P[Coef::q00];
    Q[Coef::u10] = P[Coef::u10];
    Q[Coef::u01] = P[Coef::u01];
    Q[Coef::u00] = -P[Coef::u00];
    Q[Coef::v10] = P[Coef::v10];
    Q[Coef::v01] = P[Coef::v01];
    Q[Coef::v00] = -P[Coef::v00];
    return r;
}

// True when the reflection convention applies: a lone outer saddle must sit
// on the right, and with two saddles the smaller section ordinate belongs to
// the right zone.
inline bool needs_reflection(const SystemSpec& s)
{
    const auto R = outer_constants(s.right, Side::Right);
    const auto L = outer_constants(s.left, Side::Left);
    if (!R.saddle() && L.saddle()) return true;
    if (R.saddle() && L.saddle()) return L.tau < R.tau;
    return false;
}

struct NormalizedSystem {
    SystemSpec spec;
    bool reflected = false;
};

inline NormalizedSystem normalize(const SystemSpec& s)
{
    if (needs_reflection(s)) return {reflect(s), true};
    return {s, false};
}

inline DerivedConstants derive_constants(const SystemSpec& input)
{
    for (const auto* z : {&input.left, &input.right}) {
        if (z->discriminant() == 0.0) throw Error(ErrorCode::DegenerateZone, "outer zone with a^2 + b c = 0");
        if (!(z->b > 0.0)) throw Error(ErrorCode::HypothesisViolation, "outer zone requires b > 0");
    }
    const auto n = normalize(input);
    const SystemSpec& s = n.spec;
    DerivedConstants d;
    d.reflected = n.reflected;
    d.right = outer_constants(s.right, Side::Right);
    d.left = outer_constants(s.left, Side::Left);
    if (d.right.saddle() && d.left.saddle())
        d.cls = SystemClass::SSS;
    else if (d.right.saddle())
        d.cls = SystemClass::CSS;
    else
        d.cls = SystemClass::CSC;
    double top = std::numeric_limits<double>::infinity();
    for (const auto* o : {&d.right, &d.left}) {
        if (!o->saddle()) continue;
        if (!(o->tau > 1.0))
            throw Error(ErrorCode::HypothesisViolation, "saddle section ordinate tau <= 1 leaves J0 empty");
        top = std::min(top, o->tau);
    }
    d.J0 = {1.0, top};
    d.J1 = {0.0, 1.0};
    d.J2 = {0.0, 1.0};
    return d;
}

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<Check> checks;
    bool reflected = false;

    bool ok() const
    {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    const Check* failure() const
    {
        for (const auto& c : checks)
            if (!c.passed) return &c;
        return nullptr;
    }
};

inline ValidationReport validate_hypotheses(const SystemSpec& s)
{
    ValidationReport rep;
    rep.checks.push_back({"central_saddle_at_origin", true, "H^C = y^2/2 - x^2/2"});

    bool nondeg = s.left.discriminant() != 0.0 && s.right.discriminant() != 0.0;
    rep.checks.push_back({"outer_zones_nondegenerate", nondeg, nondeg ? "" : "DegenerateZone"});
    bool bpos = s.left.b > 0.0 && s.right.b > 0.0;
    rep.checks.push_back({"outer_b_positive", bpos, bpos ? "" : "b <= 0 in an outer zone"});
    if (!nondeg) return rep;

    const auto n = normalize(s);
    rep.reflected = n.reflected;
    const auto R = outer_constants(n.spec.right, Side::Right);
    const auto L = outer_constants(n.spec.left, Side::Left);

    bool boundary = R.kind == ZoneKind::SaddleBoundary || R.kind == ZoneKind::CenterBoundary ||
                    L.kind == ZoneKind::SaddleBoundary || L.kind == ZoneKind::CenterBoundary;
    rep.checks.push_back({"no_boundary_equilibria", !boundary, boundary ? "equilibrium on a switching line" : ""});

    bool real = true;
    for (const auto* o : {&R, &L})
        if (o->saddle() && o->kind != ZoneKind::SaddleReal) real = false;
    rep.checks.push_back({"outer_saddles_real", real, real ? "" : "ThreeZoneOrbitObstruction"});

    double top = std::numeric_limits<double>::infinity();
    for (const auto* o : {&R, &L})
        if (o->saddle()) top = std::min(top, o->tau);
    bool j0 = top > 1.0;
    rep.checks.push_back({"J0_nonempty", j0, j0 ? "" : "tau <= 1"});
    return rep;
}

} // namespace pwl
