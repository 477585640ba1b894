#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "pwl/error.hpp"
#include "pwl/system.hpp"

namespace pwl {

enum class Zone { Left, Center, Right };

inline const char* to_string(Zone z)
{
    switch (z) {
    case Zone::Left: return "L";
    case Zone::Center: return "C";
    case Zone::Right: return "R";
    }
    return "?";
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// z' = A z + e with A = [[a, b], [c, -a]], so A^2 = (a^2 + b c) I.
struct ZoneLinear {
    double a = 0.0, b = 1.0, c = 1.0;
    double e1 = 0.0, e2 = 0.0;

    double disc() const { return a * a + b * c; }
    Point field(Point z) const { return {a * z.x + b * z.y + e1, c * z.x - a * z.y + e2}; }
    Point equilibrium() const
    {
        const double d = disc();
        return {-(a * e1 + b * e2) / d, -(c * e1 - a * e2) / d};
    }
};

inline ZoneLinear zone_linear(const SystemSpec& s, Zone z)
{
    switch (z) {
    case Zone::Right: return {s.right.a, s.right.b, s.right.c, -s.right.a, s.right.beta};
    case Zone::Left: return {s.left.a, s.left.b, s.left.c, s.left.a, s.left.beta};
    case Zone::Center: break;
    }
    return {0.0, 1.0, 1.0, 0.0, 0.0};
}

inline double hamiltonian(const SystemSpec& s, Zone z, Point p)
{
    const double x = p.x, y = p.y;
    switch (z) {
    case Zone::Right: {
        const auto& r = s.right;
        return r.b / 2 * y * y - r.c / 2 * x * x + r.a * x * y - r.a * y - r.beta * x;
    }
    case Zone::Left: {
        const auto& l = s.left;
        return l.b / 2 * y * y - l.c / 2 * x * x + l.a * x * y + l.a * y - l.beta * x;
    }
    case Zone::Center: break;
    }
    return y * y / 2 - x * x / 2;
}

inline bool in_zone(Zone z, Point p, double tol = 1e-9)
{
    switch (z) {
    case Zone::Right: return p.x >= 1.0 - tol;
    case Zone::Left: return p.x <= -1.0 + tol;
    case Zone::Center: break;
    }
    return p.x >= -1.0 - tol && p.x <= 1.0 + tol;
}

inline Point linear_flow(const ZoneLinear& L, Point z0, double t)
{
    const Point p = L.equilibrium();
    const double d = L.disc();
    double ch, sh;
    if (d > 0.0) {
        const double w = std::sqrt(d);
        ch = std::cosh(w * t);
        sh = std::sinh(w * t) / w;
    } else {
        const double w = std::sqrt(-d);
        ch = std::cos(w * t);
        sh = std::sin(w * t) / w;
    }
    const double dx = z0.x - p.x, dy = z0.y - p.y;
    return {p.x + ch * dx + sh * (L.a * dx + L.b * dy), p.y + ch * dy + sh * (L.c * dx - L.a * dy)};
}

inline Point zone_flow(const SystemSpec& s, Zone z, Point initial, double t)
{
    if (!in_zone(z, initial)) throw Error(ErrorCode::OutsideZone, "initial point outside the zone");
    return linear_flow(zone_linear(s, z), initial, t);
}

// Arcs of the three periodic annuli. A-arcs form L0_h (h > 1), B-arcs L1_h
// and C-arcs L2_h (0 < h < 1).
enum class Arc { AA1, A1A2, A2A3, A3A, BB1, B1B, CC1, C1C };

struct ArcInfo {
    Zone zone;
    int annulus;
    Point start, end;
};

inline ArcInfo arc_info(Arc arc, double h)
{
    switch (arc) {
    case Arc::AA1: return {Zone::Right, 0, {1, h}, {1, -h}};
    case Arc::A1A2: return {Zone::Center, 0, {1, -h}, {-1, -h}};
    case Arc::A2A3: return {Zone::Left, 0, {-1, -h}, {-1, h}};
    case Arc::A3A: return {Zone::Center, 0, {-1, h}, {1, h}};
    case Arc::BB1: return {Zone::Right, 1, {1, h}, {1, -h}};
    case Arc::B1B: return {Zone::Center, 1, {1, -h}, {1, h}};
    case Arc::CC1: return {Zone::Center, 2, {-1, h}, {-1, -h}};
    case Arc::C1C: return {Zone::Left, 2, {-1, -h}, {-1, h}};
    }
    return {Zone::Center, 0, {}, {}};
}

inline double outer_flight_time(const OuterConstants& o, double h)
{
    if (!(h > 0.0)) throw Error(ErrorCode::OutOfAnnulus, "h must be positive");
    if (o.saddle()) {
        if (!(h < o.tau * (1.0 - 1e-8)))
            throw Error(ErrorCode::OutOfAnnulus, "h too close to or beyond the saddle section ordinate");
        return std::log((h + o.tau) / (o.tau - h)) / o.omega;
    }
    const double t2 = o.tau * o.tau, h2 = h * h;
    const double th = 2 * std::numbers::pi * o.mu + (o.mu ? -1.0 : 1.0) * std::acos((t2 - h2) / (t2 + h2));
    return th / o.omega;
}

inline double flight_time(const SystemSpec& s, Arc arc, double h)
{
    const auto info = arc_info(arc, h);
    if (!(h > 0.0)) throw Error(ErrorCode::OutOfAnnulus, "h must be positive");
    if (info.annulus == 0 && !(h > 1.0)) throw Error(ErrorCode::OutOfAnnulus, "three-zone arcs need h > 1");
    if (info.annulus != 0 && !(h < 1.0)) throw Error(ErrorCode::OutOfAnnulus, "two-zone arcs need h < 1");
    switch (info.zone) {
    case Zone::Right: return outer_flight_time(outer_constants(s.right, Side::Right), h);
    case Zone::Left: return outer_flight_time(outer_constants(s.left, Side::Left), h);
    case Zone::Center: break;
    }
    return std::log((h + 1.0) / std::abs(h - 1.0));
}

struct ZoneArc {
    Zone zone = Zone::Center;
    Arc arc = Arc::AA1;
    Point start, end;
    double duration = 0.0;
    ZoneLinear lin;

    Point at(double t) const { return linear_flow(lin, start, t); }
};

inline ZoneArc make_arc(const SystemSpec& s, Arc arc, double h)
{
    const auto info = arc_info(arc, h);
    ZoneArc za;
    za.zone = info.zone;
    za.arc = arc;
    za.start = info.start;
    za.end = info.end;
    za.duration = flight_time(s, arc, h);
    za.lin = zone_linear(s, info.zone);
    return za;
}

inline std::vector<Arc> annulus_arcs(int annulus)
{
    switch (annulus) {
    case 0: return {Arc::AA1, Arc::A1A2, Arc::A2A3, Arc::A3A};
    case 1: return {Arc::BB1, Arc::B1B};
    case 2: return {Arc::CC1, Arc::C1C};
    }
    throw Error(ErrorCode::DomainError, "annulus must be 0, 1 or 2");
}

inline Interval annulus_interval(const DerivedConstants& d, int annulus)
{
    return annulus == 0 ? d.J0 : annulus == 1 ? d.J1 : d.J2;
}

inline std::vector<ZoneArc> periodic_orbit(const SystemSpec& s, int annulus, double h)
{
    const auto d = derive_constants(s);
    const auto arcs = annulus_arcs(annulus);
    // J0 bounds refer to the normalized system; the min over saddles is
    // reflection invariant, so the check is valid for s as given.
    if (!annulus_interval(d, annulus).contains(h)) throw Error(ErrorCode::OutOfAnnulus, "h outside the annulus");
    std::vector<ZoneArc> out;
    out.reserve(arcs.size());
    for (Arc a : arcs) out.push_back(make_arc(s, a, h));
    return out;
}

} // namespace pwl
