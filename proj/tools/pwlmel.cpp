// Command-line front end. Data goes to stdout (or --output), diagnostics to stderr.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pwl/pwl.hpp"

namespace {

using namespace pwl;

struct Grid {
    double lo = 0, hi = 0;
    int n = 0;
};

Grid parse_grid(const std::string& text)
{
    Grid g;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || g.n < 1 || !(g.hi >= g.lo))
        throw Error(ErrorCode::DomainError, "grid must be lo:hi:n with lo <= hi and n >= 1");
    return g;
}

Triple parse_triple(const std::string& text)
{
    Triple t{};
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> t[0] >> c1 >> t[1] >> c2 >> t[2]) || c1 != ',' || c2 != ',')
        throw Error(ErrorCode::DomainError, "target must be n0,n1,n2");
    return t;
}

std::string interval_text(const Interval& J)
{
    return "(" + fmt17(J.lo) + "," + (std::isfinite(J.hi) ? fmt17(J.hi) : std::string("inf")) + ")";
}

std::string classify_report(const SystemSpec& s)
{
    std::ostringstream o;
    const auto rep = validate_hypotheses(s);
    o << "kind_left=" << to_string(classify_zone(s.left, Side::Left)) << "\n";
    o << "kind_right=" << to_string(classify_zone(s.right, Side::Right)) << "\n";
    o << "reflected=" << (rep.reflected ? "true" : "false") << "\n";
    for (const auto& c : rep.checks)
        o << "check." << c.name << "=" << (c.passed ? "pass" : "fail") << (c.detail.empty() || c.passed ? "" : " " + c.detail) << "\n";
    if (!rep.ok()) {
        o << "valid=false\n";
        return o.str();
    }
    const auto d = derive_constants(s);
    o << "valid=true\n";
    o << "class=" << to_string(d.cls) << "\n";
    // Keys carry the zone kind: tau_RS for a right saddle, tau_LC for a left center.
    const std::string r = d.right.saddle() ? "RS" : "RC", l = d.left.saddle() ? "LS" : "LC";
    o << "omega_" << r << "=" << fmt17(d.omega_R()) << "\n";
    o << "tau_" << r << "=" << fmt17(d.tau_R()) << "\n";
    o << "mu1=" << d.mu1() << "\n";
    o << "omega_" << l << "=" << fmt17(d.omega_L()) << "\n";
    o << "tau_" << l << "=" << fmt17(d.tau_L()) << "\n";
    o << "mu2=" << d.mu2() << "\n";
    o << "J0=" << interval_text(d.J0) << "\n";
    o << "J1=" << interval_text(d.J1) << "\n";
    o << "J2=" << interval_text(d.J2) << "\n";
    return o.str();
}

std::string orbit_csv(const SystemSpec& s, int annulus, double h, int per_arc)
{
    std::ostringstream o;
    o << "annulus,h,zone,t,x,y\n";
    double t0 = 0;
    for (const auto& arc : periodic_orbit(s, annulus, h)) {
        for (int i = 0; i <= per_arc; ++i) {
            const double t = arc.duration * i / per_arc;
            const Point p = arc.at(t);
            o << annulus << "," << fmt17(h) << "," << to_string(arc.zone) << "," << fmt17(t0 + t) << "," << fmt17(p.x)
              << "," << fmt17(p.y) << "\n";
        }
        t0 += arc.duration;
    }
    return o.str();
}

std::string melnikov_csv(const SystemSpec& s, int which, const Grid& g, const std::string& method)
{
    if (which < 0 || which > 2) throw Error(ErrorCode::DomainError, "--which must be 0, 1 or 2");
    const auto J = melnikov_domain(s, which);
    std::ostringstream o;
    o << "h,M,method\n";
    std::array<MelnikovForm, 3> forms;
    const bool closed = method == "closed" || method == "both";
    const bool quad = method == "quadrature" || method == "both";
    if (!closed && !quad) throw Error(ErrorCode::DomainError, "--method must be closed, quadrature or both");
    if (closed) forms = closed_form_M(s);
    for (int i = 0; i < g.n; ++i) {
        const double h = g.n == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.n - 1);
        if (!J.contains(h)) throw Error(ErrorCode::DomainError, "grid point " + fmt17(h) + " outside the annulus");
        if (closed) o << fmt17(h) << "," << fmt17(forms[which](h)) << ",closed\n";
        if (quad) o << fmt17(h) << "," << fmt17(quadrature_M(s, which, h)) << ",quadrature\n";
    }
    return o.str();
}

std::string expand_json(const SystemSpec& s, TableConvention conv)
{
    const auto e = expand_at_one(s, conv);
    const auto a = alpha_relation(s, conv);
    auto vec = [](const auto& v) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt17(v[i]);
        return out + "]";
    };
    std::ostringstream o;
    o << "{\n  \"class\": \"" << to_string(e.cls) << "\",\n";
    o << "  \"reflected\": " << (e.reflected ? "true" : "false") << ",\n";
    o << "  \"convention\": \"" << to_string(conv) << "\",\n";
    o << "  \"expansions\": [\n";
    for (int w = 0; w < 3; ++w) {
        const auto& m = e.M[w];
        o << "    {\"which\": " << w << ", \"side\": \"" << (m.side > 0 ? "h>1" : "h<1") << "\", \"C\": " << vec(m.C)
          << ", \"D\": " << vec(m.D) << "}" << (w < 2 ? "," : "") << "\n";
    }
    o << "  ],\n";
    o << "  \"rank\": " << rank_at(s) << ",\n";
    o << "  \"alpha\": " << vec(a.alpha);
    if (a.phi_ratio) o << ",\n  \"phi_ratio\": " << fmt17(*a.phi_ratio);
    o << "\n}\n";
    return o.str();
}

std::string zero_csv(const ZeroReport& r)
{
    std::ostringstream o;
    o << "annulus,lo,hi,root,slope\n";
    for (int w = 0; w < 3; ++w)
        for (const auto& b : r.brackets[w])
            o << w << "," << fmt17(b.lo) << "," << fmt17(b.hi) << "," << fmt17(b.root) << "," << fmt17(b.slope) << "\n";
    return o.str();
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::DomainError, "cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Melnikov analysis of three-zone piecewise-linear Hamiltonian systems"};
    app.set_help_flag("--help", "print help"); // -h is taken by --h below
    app.require_subcommand(1);
    std::string output;
    app.add_option("-o,--output", output, "write data here instead of stdout");

    std::string input;
    auto* classify = app.add_subcommand("classify", "zone kinds, constants and hypothesis checks");
    classify->add_option("spec", input, "system file")->required();

    auto* orbit = app.add_subcommand("orbit", "unperturbed periodic orbits");
    orbit->require_subcommand(1);
    auto* dump = orbit->add_subcommand("dump", "sample an orbit as CSV annulus,h,zone,t,x,y");
    int annulus = 0, per_arc = 64;
    double h = 0.5;
    dump->add_option("--annulus", annulus, "0, 1 or 2")->required();
    dump->add_option("--h", h, "section ordinate")->required();
    dump->add_option("--samples", per_arc, "points per arc")->check(CLI::PositiveNumber);
    dump->add_option("spec", input, "system file")->required();

    auto* mel = app.add_subcommand("melnikov", "Melnikov functions");
    mel->require_subcommand(1);
    auto* eval = mel->add_subcommand("eval", "evaluate M on a grid as CSV h,M,method");
    int which = 0;
    std::string grid, method = "closed";
    eval->add_option("--which", which, "0, 1 or 2")->required();
    eval->add_option("--grid", grid, "lo:hi:n")->required();
    eval->add_option("--method", method, "closed, quadrature or both");
    eval->add_option("spec", input, "system file")->required();

    auto* expand = app.add_subcommand("expand", "series coefficients at h = 1 as JSON");
    std::string convention = "corrected";
    expand->add_option("--convention", convention, "corrected or published");
    expand->add_option("spec", input, "system file")->required();

    auto* realize = app.add_subcommand("realize", "perturbation with a prescribed zero configuration");
    std::string target, spec_out;
    double delta = 0.3;
    realize->add_option("--target", target, "n0,n1,n2")->required();
    realize->add_option("--delta", delta, "window half-width");
    realize->add_option("--spec-out", spec_out, "also write the realized system file here");
    realize->add_option("spec", input, "system file")->required();

    auto* sim = app.add_subcommand("simulate", "integrate the perturbed system");
    double eps = 1e-3;
    bool find_cycles = false;
    SimOptions so;
    sim->add_option("--epsilon", eps, "perturbation size in [0, 0.05]");
    sim->add_option("--annulus", annulus, "0, 1 or 2");
    sim->add_option("--h", h, "section ordinate of the start point");
    sim->add_flag("--find-cycles", find_cycles, "locate return-map fixed points near the Melnikov zeros");
    sim->add_option("--delta", delta, "zero-count window half-width for --find-cycles");
    sim->add_option("--rtol", so.rtol, "relative tolerance")->check(CLI::PositiveNumber);
    sim->add_option("--atol", so.atol, "absolute tolerance")->check(CLI::PositiveNumber);
    sim->add_option("spec", input, "system file")->required();

    // CLI11 reports a stray word as a missing subcommand; name it properly.
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "-o" || a == "--output") {
            ++i;
            continue;
        }
        if (a.empty() || a[0] == '-' || a.find('=') != std::string::npos) continue;
        if (!app.get_subcommand_no_throw(a)) {
            std::cerr << "UnknownSubcommand: " << a << "\n";
            return 2;
        }
        break;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ParseError: " << e.what() << "\n";
        return 2;
    }

    try {
        const SystemSpec s = load_spec(input);
        if (*classify) {
            emit(classify_report(s), output);
        } else if (*dump) {
            emit(orbit_csv(s, annulus, h, per_arc), output);
        } else if (*eval) {
            emit(melnikov_csv(s, which, parse_grid(grid), method), output);
        } else if (*expand) {
            if (convention != "corrected" && convention != "published")
                throw Error(ErrorCode::DomainError, "--convention must be corrected or published");
            emit(expand_json(s, convention == "corrected" ? TableConvention::Corrected : TableConvention::Published), output);
        } else if (*realize) {
            RealizeOptions opt;
            opt.delta = delta;
            const auto r = realize_configuration(s, parse_triple(target), opt);
            std::cerr << "method=" << r.method << " counts=" << r.report.counts[0] << "," << r.report.counts[1] << ","
                      << r.report.counts[2] << "\n";
            if (!spec_out.empty()) {
                std::ofstream f(spec_out);
                if (!f) throw Error(ErrorCode::DomainError, "cannot write " + spec_out);
                f << spec_to_json(r.system);
            }
            emit(spec_to_json(r.system) + zero_csv(r.report), output);
        } else if (*sim) {
            if (find_cycles) {
                const auto rep = count_zeros(s, s.perturbation, delta);
                const auto cycles = detect_limit_cycles(s, eps, s.perturbation, rep, so);
                std::ostringstream o;
                o << "annulus,h_star,epsilon,residual\n";
                int lost = 0;
                for (const auto& c : cycles) {
                    if (!c.found) {
                        ++lost;
                        std::cerr << to_string(c.failure) << ": annulus " << c.annulus << " near h = " << fmt17(c.predicted) << "\n";
                        continue;
                    }
                    o << c.annulus << "," << fmt17(c.h_star) << "," << fmt17(eps) << "," << fmt17(c.residual) << "\n";
                }
                emit(o.str(), output);
            } else {
                std::ostringstream o;
                o << "t,x,y,zone\n";
                const auto loop = poincare_loop(s, eps, annulus, h, so, [&](const TrajectorySample& p) {
                    o << fmt17(p.t) << "," << fmt17(p.p.x) << "," << fmt17(p.p.y) << "," << to_string(p.zone) << "\n";
                });
                std::cerr << "displacement=" << fmt17(loop.displacement) << "\n";
                emit(o.str(), output);
            }
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return is_numerical(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
