#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pwl/error.hpp"
#include "pwl/expansion.hpp"
#include "pwl/melnikov.hpp"
#include "pwl/system.hpp"

namespace pwl {

using Triple = std::array<int, 3>;

struct ZeroBracket {
    double lo = 0.0;
    double hi = 0.0;
    double root = 0.0;
    double slope = 0.0;
};

struct ZeroReport {
    Triple counts{};
    std::array<std::vector<ZeroBracket>, 3> brackets;
    int rejected = 0; // sign changes that failed the simplicity test
};

inline void check_window(const SystemSpec& s, double delta)
{
    const auto d = derive_constants(s);
    double cap = 0.5;
    if (std::isfinite(d.J0.hi)) cap = std::min(cap, d.J0.hi - 1.0);
    if (!(delta > 0.0 && delta < cap)) throw Error(ErrorCode::WindowTooLarge, "window half-width must lie in (0, " + std::to_string(cap) + ")");
}

// Offsets |h - 1|, geometric from 1e-13 up to delta.
inline std::vector<double> window_offsets(double delta, int n)
{
    std::vector<double> x(n);
    const double lo = std::log(1e-13), hi = std::log(delta);
    for (int i = 0; i < n; ++i) x[i] = std::exp(lo + (hi - lo) * i / (n - 1));
    x.back() = delta;
    return x;
}

inline std::vector<ZeroBracket> simple_zeros(const MelnikovForm& f, double delta, int samples, int* rejected)
{
    const int side = f.which == 0 ? 1 : -1;
    const auto xs = window_offsets(delta, samples);
    std::vector<double> hs(samples), vs(samples);
    double vmax = 0.0;
    for (int i = 0; i < samples; ++i) {
        hs[i] = 1.0 + side * xs[i];
        vs[i] = f.value(hs[i]);
        vmax = std::max(vmax, std::abs(vs[i]));
    }
    std::vector<ZeroBracket> out;
    if (vmax == 0.0) return out;
    const double scale = vmax / delta;
    for (int i = 0; i + 1 < samples; ++i) {
        if (!(std::signbit(vs[i]) != std::signbit(vs[i + 1]))) continue;
        double a = hs[i], b = hs[i + 1], fa = vs[i];
        const double lo0 = std::min(a, b), hi0 = std::max(a, b);
        while (std::abs(b - a) > 1e-12) {
            const double m = 0.5 * (a + b);
            const double fm = f.value(m);
            if (std::signbit(fm) == std::signbit(fa)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            if (m == a && m == b) break;
        }
        const double r = 0.5 * (a + b);
        const double edge = std::min(std::abs(r - 1.0), delta - std::abs(r - 1.0));
        const double step = std::min(1e-7 * std::max(1.0, std::abs(r)), 0.5 * edge);
        const double slope = (f.value(r + step) - f.value(r - step)) / (2 * step);
        if (std::abs(slope) > 1e-8 * scale)
            out.push_back({lo0, hi0, r, slope});
        else if (rejected)
            ++*rejected;
    }
    return out;
}

inline ZeroReport count_zeros(const std::array<MelnikovForm, 3>& forms, double delta, int samples = 4096)
{
    ZeroReport rep;
    for (int w = 0; w < 3; ++w) {
        rep.brackets[w] = simple_zeros(forms[w], delta, samples, &rep.rejected);
        rep.counts[w] = static_cast<int>(rep.brackets[w].size());
    }
    return rep;
}

inline ZeroReport count_zeros(const SystemSpec& s, const PerturbationCoeffs& P, double delta = 0.3,
                              int samples = 4096)
{
    if (samples < 4096) throw Error(ErrorCode::DomainError, "at least 4096 scan samples are required");
    check_window(s, delta);
    SystemSpec q = s;
    q.perturbation = P;
    return count_zeros(closed_form_M(q), delta, samples);
}

// Melnikov forms of the five free directions; M(theta) = sum theta_j F_j.
struct LinearFamily {
    std::array<std::array<MelnikovForm, 3>, 5> unit;

    std::array<MelnikovForm, 3> combine(const std::array<double, 5>& theta) const
    {
        std::array<MelnikovForm, 3> out = unit[0];
        for (int w = 0; w < 3; ++w)
            for (std::size_t t = 0; t < out[w].terms.size(); ++t) {
                double k = 0.0;
                for (int j = 0; j < 5; ++j) k += theta[j] * unit[j][w].terms[t].k;
                out[w].terms[t].k = k;
            }
        return out;
    }
};

inline LinearFamily linear_family(const SystemSpec& normalized)
{
    LinearFamily fam;
    SystemSpec q = normalized;
    for (int j = 0; j < 5; ++j) {
        q.perturbation = PerturbationCoeffs::unit(free_coefs[j]);
        fam.unit[j] = closed_form_M(q);
    }
    return fam;
}

struct RealizeOptions {
    double delta = 0.3;
    double eta0 = 1e-2;
    int eta_shrinks = 4;
    bool placement_fallback = true;
    int grid = 26;
    double grid_lo = 1e-6;
    int coarse_samples = 400;
    int verify_candidates = 24;
    int samples = 4096;
};

struct Realization {
    SystemSpec system; // normalized orientation, perturbation filled in
    PerturbationCoeffs perturbation;
    std::array<double, 5> theta{};
    ZeroReport report;
    std::string method;
    double eta = 0.0;
    double alpha_published = 0.0;
    double alpha_corrected = 0.0;
    bool reflected = false;
};

inline std::vector<Triple> supported_targets(double alpha)
{
    if (alpha < 0.0 && std::abs(alpha + 1.0) > 1e-9) return {{2, 2, 2}};
    return {{2, 2, 1}, {1, 2, 2}};
}

namespace detail {

inline Eigen::Matrix<double, 5, 1> null_vector(const Eigen::Matrix<double, 4, 5>& A)
{
    Eigen::Matrix<double, 5, 1> v;
    for (int j = 0; j < 5; ++j) {
        Eigen::Matrix4d m;
        for (int c = 0, k = 0; c < 5; ++c)
            if (c != j) m.col(k++) = A.col(c);
        v(j) = ((j % 2) ? -1.0 : 1.0) * m.determinant();
    }
    return v;
}

struct Candidate {
    double score = 0.0;
    std::array<double, 5> theta{};
};

// Slope times spacing of the weakest zero for a unit-norm parameter vector.
// A zero survives a perturbation of the return map of about this size.
inline double coarse_score(const Eigen::VectorXd& v, const std::vector<double>& xs, double delta, int& count)
{
    count = 0;
    std::vector<std::pair<double, double>> roots;
    for (int i = 0; i + 1 < v.size(); ++i)
        if (std::signbit(v(i)) != std::signbit(v(i + 1))) {
            const double slope = std::abs(v(i + 1) - v(i)) / (xs[i + 1] - xs[i]);
            roots.push_back({std::sqrt(xs[i] * xs[i + 1]), slope});
        }
    count = static_cast<int>(roots.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < roots.size(); ++r) {
        double gap = std::min(roots[r].first, delta - roots[r].first);
        if (r > 0) gap = std::min(gap, roots[r].first - roots[r - 1].first);
        if (r + 1 < roots.size()) gap = std::min(gap, roots[r + 1].first - roots[r].first);
        best = std::min(best, roots[r].second * gap);
    }
    return best;
}

} // namespace detail

inline std::array<double, 5> ladder_targets(double alpha, double eta)
{
    // (C1^0, C1^1, C1^2, C2^0, C2^1)
    if (alpha <= -1.0) return {eta * eta / 2, 2 * eta, 1.0, -eta * eta, -eta};
    return {eta * eta, eta, 1.0, -eta * eta / 2, -2 * eta};
}

inline Realization realize_configuration(const SystemSpec& input, Triple target, const RealizeOptions& opt = {})
{
    const auto n = normalize(input);
    const SystemSpec& s = n.spec;
    check_window(s, opt.delta);
    Realization out;
    out.reflected = n.reflected;
    out.alpha_published = alpha_relation(s, TableConvention::Published).a12();
    out.alpha_corrected = alpha_relation(s, TableConvention::Corrected).a12();
    const auto allowed = supported_targets(out.alpha_published);
    if (std::find(allowed.begin(), allowed.end(), target) == allowed.end())
        throw Error(ErrorCode::TargetNotSupported, "configuration not covered for alpha_1^2 = " + std::to_string(out.alpha_published));

    const auto fam = linear_family(s);
    auto finish = [&](const std::array<double, 5>& theta0, const std::string& method, double eta) {
        // Largest free coefficient 1, so eps sets the size of the perturbing field.
        std::array<double, 5> theta = theta0;
        double m = 0.0;
        for (double t : theta) m = std::max(m, std::abs(t));
        if (m > 0)
            for (double& t : theta) t /= m;
        out.theta = theta;
        out.method = method;
        out.eta = eta;
        out.perturbation = {};
        for (int j = 0; j < 5; ++j) out.perturbation[free_coefs[j]] = theta[j];
        out.system = s;
        out.system.perturbation = out.perturbation;
        out.report = count_zeros(fam.combine(theta), opt.delta, opt.samples);
    };

    // Ladder: prescribe signs and magnitudes of the five free coefficients.
    const Eigen::Matrix<double, 5, 5> J = coefficient_jacobian(s, TableConvention::Corrected).topRows<5>();
    const auto lu = J.fullPivLu();
    double eta = opt.eta0;
    for (int attempt = 0; attempt <= opt.eta_shrinks; ++attempt, eta /= 10) {
        const auto c = ladder_targets(out.alpha_corrected, eta);
        const Eigen::Matrix<double, 5, 1> th = lu.solve(Eigen::Map<const Eigen::Matrix<double, 5, 1>>(c.data()));
        std::array<double, 5> theta;
        for (int j = 0; j < 5; ++j) theta[j] = th(j);
        const auto rep = count_zeros(fam.combine(theta), opt.delta, opt.samples);
        if (rep.counts == target) {
            finish(theta, "ladder", eta);
            return out;
        }
    }
    if (!opt.placement_fallback) throw Error(ErrorCode::LadderFailed, "eta ladder did not produce the target");

    // Placement: pin two zeros in each of two functions, the fifth degree of
    // freedom is the overall scale.
    std::vector<double> g(opt.grid);
    for (int i = 0; i < opt.grid; ++i)
        g[i] = std::exp(std::log(opt.grid_lo) + (std::log(0.97 * opt.delta) - std::log(opt.grid_lo)) * i / (opt.grid - 1));
    auto row = [&](int w, double x) {
        Eigen::Matrix<double, 1, 5> r;
        const double h = w == 0 ? 1.0 + x : 1.0 - x;
        for (int j = 0; j < 5; ++j) r(j) = fam.unit[j][w].value(h);
        return r / r.norm();
    };
    std::array<std::vector<Eigen::Matrix<double, 1, 5>>, 3> rows;
    for (int w = 0; w < 3; ++w)
        for (double x : g) rows[w].push_back(row(w, x));

    const auto xs = window_offsets(opt.delta, opt.coarse_samples);
    std::array<Eigen::MatrixXd, 3> B;
    for (int w = 0; w < 3; ++w) {
        B[w].resize(opt.coarse_samples, 5);
        for (int i = 0; i < opt.coarse_samples; ++i)
            for (int j = 0; j < 5; ++j) B[w](i, j) = fam.unit[j][w].value(w == 0 ? 1.0 + xs[i] : 1.0 - xs[i]);
    }

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < opt.grid; ++i)
        for (int j = i + 1; j < opt.grid; ++j) pairs.push_back({i, j});

    std::vector<detail::Candidate> cands;
    const std::array<std::pair<int, int>, 3> combos = {{{0, 1}, {0, 2}, {1, 2}}};
    for (auto [wa, wb] : combos) {
        if (target[wa] < 2 || target[wb] < 2) continue;
        for (const auto& pa : pairs)
            for (const auto& pb : pairs) {
                Eigen::Matrix<double, 4, 5> A;
                A.row(0) = rows[wa][pa.first];
                A.row(1) = rows[wa][pa.second];
                A.row(2) = rows[wb][pb.first];
                A.row(3) = rows[wb][pb.second];
                Eigen::Matrix<double, 5, 1> th = detail::null_vector(A);
                if (th.norm() == 0.0) continue;
                th.normalize();
                double score = std::numeric_limits<double>::infinity();
                bool ok = true;
                for (int w = 0; w < 3 && ok; ++w) {
                    int cnt = 0;
                    const Eigen::VectorXd v = B[w] * th;
                    score = std::min(score, detail::coarse_score(v, xs, opt.delta, cnt));
                    ok = cnt == target[w];
                }
                if (!ok) continue;
                detail::Candidate c;
                c.score = score;
                for (int j = 0; j < 5; ++j) c.theta[j] = th(j);
                cands.push_back(c);
            }
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    const int nv = std::min<int>(opt.verify_candidates, static_cast<int>(cands.size()));
    for (int c = 0; c < nv; ++c) {
        const auto rep = count_zeros(fam.combine(cands[c].theta), opt.delta, opt.samples);
        if (rep.counts == target && rep.rejected == 0) {
            finish(cands[c].theta, "placement", 0.0);
            return out;
        }
    }
    throw Error(ErrorCode::LadderFailed, "no perturbation with the target zero counts was found");
}

} // namespace pwl
