#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "pwl/error.hpp"
#include "pwl/geometry.hpp"
#include "pwl/system.hpp"
#include "pwl/zeros.hpp"

namespace pwl {

struct SimOptions {
    // A decade below 1e-10 / 1e-12: long real-center arcs otherwise leave
    // ~3e-9 of global error in the unperturbed return map.
    double rtol = 1e-11;
    double atol = 1e-13;
    double event_tol = 1e-12;
    double box = 1e3;       // |x|, |y| bound before Escape
    double max_time = 1e3;  // per arc
    double tangency = 1e-9; // |x'| at a crossing
};

struct Crossing {
    Point point;
    double time = 0.0;
    Zone zone = Zone::Center; // zone the arc ran through
};

struct TrajectorySample {
    double t = 0.0;
    Point p;
    Zone zone = Zone::Center;
};

using TrajectoryObserver = std::function<void(const TrajectorySample&)>;

// x' = H_y + eps f, y' = -H_x + eps g, with the zone frozen.
inline Point perturbed_field(const SystemSpec& s, Zone z, double eps, Point p)
{
    const auto L = zone_linear(s, z);
    Point v = L.field(p);
    const auto& P = s.perturbation;
    double f, g;
    switch (z) {
    case Zone::Right:
        f = P[Coef::p10] * p.x + P[Coef::p01] * p.y + P[Coef::p00];
        g = P[Coef::q10] * p.x + P[Coef::q01] * p.y + P[Coef::q00];
        break;
    case Zone::Left:
        f = P[Coef::r10] * p.x + P[Coef::r01] * p.y + P[Coef::r00];
        g = P[Coef::s10] * p.x + P[Coef::s01] * p.y + P[Coef::s00];
        break;
    default:
        f = P[Coef::u10] * p.x + P[Coef::u01] * p.y + P[Coef::u00];
        g = P[Coef::v10] * p.x + P[Coef::v01] * p.y + P[Coef::v00];
        break;
    }
    v.x += eps * f;
    v.y += eps * g;
    return v;
}

namespace detail {

struct DPStep {
    Point y5;
    double err = 0.0;
};

// One Dormand-Prince 5(4) step; err is the scaled error norm.
template <class F>
DPStep dopri_step(F& f, Point y, double h, const SimOptions& o)
{
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    auto add = [](Point p, std::initializer_list<std::pair<double, Point>> terms, double h) {
        for (const auto& [c, k] : terms) {
            p.x += h * c * k.x;
            p.y += h * c * k.y;
        }
        return p;
    };
    const Point k1 = f(y);
    const Point k2 = f(add(y, {{a21, k1}}, h));
    const Point k3 = f(add(y, {{a31, k1}, {a32, k2}}, h));
    const Point k4 = f(add(y, {{a41, k1}, {a42, k2}, {a43, k3}}, h));
    const Point k5 = f(add(y, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}, h));
    const Point k6 = f(add(y, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}, h));
    const Point y5 = add(y, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}}, h);
    const Point k7 = f(y5);
    const Point e = add(Point{0, 0}, {{e1, k1}, {e3, k3}, {e4, k4}, {e5, k5}, {e6, k6}, {e7, k7}}, h);
    const double sx = o.atol + o.rtol * std::max(std::abs(y.x), std::abs(y5.x));
    const double sy = o.atol + o.rtol * std::max(std::abs(y.y), std::abs(y5.y));
    return {y5, std::sqrt(0.5 * ((e.x / sx) * (e.x / sx) + (e.y / sy) * (e.y / sy)))};
}

} // namespace detail

// Zone entered from a point on x = +-1, judged by the perturbed velocity.
inline Zone entry_zone(const SystemSpec& s, double eps, Point start)
{
    const bool right_line = start.x > 0;
    // Both candidate zones share the line; use the outer one to read x'.
    const double vx = perturbed_field(s, right_line ? Zone::Right : Zone::Left, eps, start).x;
    if (right_line) return vx > 0 ? Zone::Right : Zone::Center;
    return vx < 0 ? Zone::Left : Zone::Center;
}

inline Crossing integrate_across(const SystemSpec& s, double eps, Point start, const SimOptions& o = {},
                                 const TrajectoryObserver& observe = nullptr)
{
    if (!(eps >= 0.0 && eps <= 0.05)) throw Error(ErrorCode::DomainError, "epsilon must lie in [0, 0.05]");
    if (std::abs(std::abs(start.x) - 1.0) > 1e-9) throw Error(ErrorCode::DomainError, "start must lie on x = +-1");
    const Zone z = entry_zone(s, eps, start);
    {
        const double vx = perturbed_field(s, z, eps, start).x;
        if (std::abs(vx) < o.tangency) throw Error(ErrorCode::TangencyEncountered, "tangent start");
    }
    auto f = [&](Point p) { return perturbed_field(s, z, eps, p); };
    // Event functions: positive inside the zone.
    auto inside = [&](Point p) {
        switch (z) {
        case Zone::Right: return p.x - 1.0;
        case Zone::Left: return -1.0 - p.x;
        default: return std::min(p.x + 1.0, 1.0 - p.x);
        }
    };

    Point y = start;
    double t = 0.0;
    double h = 1e-3;
    if (observe) observe({t, y, z});
    while (true) {
        if (t > o.max_time) throw Error(ErrorCode::Escape, "arc exceeded the time limit");
        auto st = detail::dopri_step(f, y, h, o);
        if (st.err > 1.0) {
            h *= std::max(0.1, 0.9 * std::pow(st.err, -0.2));
            if (h < 1e-14) throw Error(ErrorCode::Escape, "step size underflow");
            continue;
        }
        const Point yn = st.y5;
        if (std::abs(yn.x) > o.box || std::abs(yn.y) > o.box) throw Error(ErrorCode::Escape, "left the bounding box");
        if (inside(yn) < 0.0) {
            // Bisection in the step length from the accepted state y.
            double lo = 0.0, hi = h;
            Point plo = y, phi = yn;
            while (hi - lo > 1e-15 * std::max(1.0, t) && std::abs(inside(phi)) > o.event_tol) {
                const double mid = 0.5 * (lo + hi);
                const Point pm = detail::dopri_step(f, y, mid, o).y5;
                if (inside(pm) >= 0.0) {
                    lo = mid;
                    plo = pm;
                } else {
                    hi = mid;
                    phi = pm;
                }
            }
            // Take the side nearer the line, then snap onto it.
            const bool low = std::abs(inside(plo)) < std::abs(inside(phi));
            Point pc = low ? plo : phi;
            const double tc = t + (low ? lo : hi);
            pc.x = pc.x > 0 ? 1.0 : -1.0;
            const double vx = f(pc).x;
            if (std::abs(vx) < o.tangency) throw Error(ErrorCode::TangencyEncountered, "tangential contact");
            if (observe) observe({tc, pc, z});
            return {pc, tc, z};
        }
        t += h;
        y = yn;
        if (observe) observe({t, y, z});
        const double fac = st.err > 0 ? 0.9 * std::pow(st.err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
}

inline Interval margin_interval(const SystemSpec& s, int annulus, double margin = 1e-3)
{
    const auto J = annulus_interval(derive_constants(s), annulus);
    return {J.lo + margin, std::isfinite(J.hi) ? J.hi - margin : J.hi};
}

struct LoopResult {
    double displacement = 0.0;
    double period = 0.0;
    std::vector<Crossing> crossings;
};

// Full turn from (1, h) (annuli 0, 1) or (-1, h) (annulus 2). Displacement in
// H^R for annuli 0 and 1, and H^L / b_L for annulus 2, matching M0, M1, M2.
inline LoopResult poincare_loop(const SystemSpec& s, double eps, int annulus, double h, const SimOptions& o = {},
                                const TrajectoryObserver& observe = nullptr)
{
    if (annulus < 0 || annulus > 2) throw Error(ErrorCode::DomainError, "annulus must be 0, 1 or 2");
    if (!margin_interval(s, annulus).contains(h)) throw Error(ErrorCode::OutOfAnnulus, "h outside the annulus margin");
    const double x0 = annulus == 2 ? -1.0 : 1.0;
    static const std::array<std::vector<double>, 3> ends = {{{1, -1, -1, 1}, {1, 1}, {-1, -1}}};
    const std::size_t arcs = ends[annulus].size();
    LoopResult out;
    Point p{x0, h};
    double t0 = 0.0;
    for (std::size_t k = 0; k < arcs; ++k) {
        TrajectoryObserver shifted;
        if (observe) shifted = [&](const TrajectorySample& smp) { observe({smp.t + t0, smp.p, smp.zone}); };
        auto c = integrate_across(s, eps, p, o, shifted);
        out.crossings.push_back(c);
        t0 += c.time;
        p = c.point;
        if (p.x != ends[annulus][k]) throw Error(ErrorCode::Escape, "orbit left the expected annulus");
    }
    if (p.y <= 0) throw Error(ErrorCode::Escape, "return point below the section");
    out.period = t0;
    const double ye = p.y;
    const double b = annulus == 2 ? 1.0 : s.right.b;
    out.displacement = 0.5 * b * (ye - h) * (ye + h);
    return out;
}

inline double poincare_displacement(const SystemSpec& s, double eps, int annulus, double h, const SimOptions& o = {})
{
    return poincare_loop(s, eps, annulus, h, o).displacement;
}

struct LimitCycle {
    int annulus = 0;
    double predicted = 0.0;
    double h_star = 0.0;
    double residual = 0.0;
    bool found = false;
    ErrorCode failure = ErrorCode::BracketLost;
};

// For every predicted simple zero, bracket and refine a fixed point of the
// perturbed return map in the same annulus.
inline std::vector<LimitCycle> detect_limit_cycles(const SystemSpec& s, double eps, const PerturbationCoeffs& P,
                                                   const ZeroReport& predicted, const SimOptions& o = {})
{
    SystemSpec q = s;
    q.perturbation = P;
    std::vector<LimitCycle> out;
    for (int w = 0; w < 3; ++w) {
        const auto J = margin_interval(q, w);
        std::vector<double> roots;
        for (const auto& b : predicted.brackets[w]) roots.push_back(b.root);
        std::sort(roots.begin(), roots.end());
        for (std::size_t i = 0; i < roots.size(); ++i) {
            LimitCycle lc;
            lc.annulus = w;
            lc.predicted = roots[i];
            // Search region: halfway to the neighbouring predicted zeros.
            double lo = i > 0 ? 0.5 * (roots[i - 1] + roots[i]) : J.lo;
            double hi = i + 1 < roots.size() ? 0.5 * (roots[i] + roots[i + 1]) : J.hi;
            if (!std::isfinite(hi)) hi = roots[i] + 1.0;
            lo = std::max(lo, J.lo);
            hi = std::min(hi, J.hi - 1e-12);
            auto D = [&](double h) { return poincare_displacement(q, eps, w, h, o); };
            try {
                // Widen symmetric probes around the prediction until the sign flips.
                double a = 0, b = 0, fa = 0, fb = 0;
                bool ok = false;
                const double span = std::min(roots[i] - lo, hi - roots[i]);
                for (double d = std::min(4 * eps, 0.25 * span); d <= span * (1 + 1e-12); d *= 2) {
                    a = std::max(lo, roots[i] - d);
                    b = std::min(hi, roots[i] + d);
                    fa = D(a);
                    fb = D(b);
                    if (std::signbit(fa) != std::signbit(fb)) {
                        ok = true;
                        break;
                    }
                    if (d >= span) break;
                    if (2 * d > span) d = span / 2;
                }
                if (!ok) {
                    out.push_back(lc);
                    continue;
                }
                double m = 0.5 * (a + b), fm = D(m);
                for (int it = 0; it < 200 && std::abs(fm) >= 1e-12 && b - a > 1e-15; ++it) {
                    if (std::signbit(fm) == std::signbit(fa)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                    m = 0.5 * (a + b);
                    fm = D(m);
                }
                lc.h_star = m;
                lc.residual = std::abs(fm);
                lc.found = lc.residual < 1e-10;
                if (!lc.found) lc.failure = ErrorCode::BracketLost;
            } catch (const Error& e) {
                lc.failure = e.code();
            }
            out.push_back(lc);
        }
    }
    return out;
}

} // namespace pwl
