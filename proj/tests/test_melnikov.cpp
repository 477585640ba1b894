#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "fixtures.hpp"

using namespace pwl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Frozen {
    const char* system;
    int which;
    double h;
    double M;
};

// Example perturbation, M from an independent scipy quadrature over the
// explicit flows with the corollary weights written out by hand.
const Frozen frozen[] = {
    {"sss_homoclinic", 0, 1.05, 0.130722080713543},
    {"sss_homoclinic", 0, 1.5, -0.383682588311452},
    {"sss_homoclinic", 1, 0.3, 0.259360369449901},
    {"sss_homoclinic", 1, 0.8, 0.468130098636617},
    {"sss_homoclinic", 2, 0.3, 0.286788134034872},
    {"sss_homoclinic", 2, 0.8, 0.496538517891521},
    {"sss_heteroclinic", 0, 1.05, 0.443075737506796},
    {"sss_heteroclinic", 0, 1.5, 0.269918977370578},
    {"sss_heteroclinic", 1, 0.3, 0.259360369449901},
    {"sss_heteroclinic", 1, 0.8, 0.468130098636617},
    {"sss_heteroclinic", 2, 0.3, 0.348908324675481},
    {"sss_heteroclinic", 2, 0.8, 0.699303118909142},
    {"css_virtual", 0, 1.05, 1.06488405068359},
    {"css_virtual", 0, 1.5, 1.3226190453639},
    {"css_virtual", 1, 0.3, 0.259360369449901},
    {"css_virtual", 1, 0.8, 0.468130098636617},
    {"css_virtual", 2, 0.3, 0.426199538897989},
    {"css_virtual", 2, 0.8, 1.08632414085867},
    {"css_real", 0, 1.05, 22.4066642092899},
    {"css_real", 0, 1.5, 23.9006061698052},
    {"css_real", 1, 0.3, 0.259360369449901},
    {"css_real", 1, 0.8, 0.468130098636617},
    {"css_real", 2, 0.3, 20.3883421168242},
    {"css_real", 2, 0.8, 21.8566476896374},
    {"csc_vv", 0, 1.05, 1.24671592642045},
    {"csc_vv", 0, 1.5, 1.62018228109682},
    {"csc_vv", 1, 0.3, 0.265845627319246},
    {"csc_vv", 1, 0.8, 0.565656761659463},
    {"csc_vv", 2, 0.3, 0.426199538897989},
    {"csc_vv", 2, 0.8, 1.08632414085867},
    {"csc_vr", 0, 1.05, 11.5120501236129},
    {"csc_vr", 0, 1.5, 12.9885026878846},
    {"csc_vr", 1, 0.3, 0.265845627319246},
    {"csc_vr", 1, 0.8, 0.565656761659463},
    {"csc_vr", 2, 0.3, 9.39068754505518},
    {"csc_vr", 2, 0.8, 10.8237336287232},
    {"csc_rr", 0, 1.05, 15.4870940972492},
    {"csc_rr", 0, 1.5, 18.105015380179},
    {"csc_rr", 1, 0.3, 2.80756576265759},
    {"csc_rr", 1, 0.8, 3.96995300770497},
    {"csc_rr", 2, 0.3, 9.39068754505518},
    {"csc_rr", 2, 0.8, 10.8237336287232}};

SystemSpec by_name(const std::string& n)
{
    for (auto& [name, s] : fx::all_systems())
        if (name == n) return s;
    FAIL("unknown system " << n);
    return {};
}

} // namespace

TEST_CASE("basis functions at hand-checked points")
{
    CHECK(basis_eval({BasisTag::F0}, 2.0) == 2.0);
    CHECK_THAT(basis_eval({BasisTag::FC}, 0.5), WithinRel(-0.75 * std::log(3.0), 1e-15));
    CHECK_THAT(basis_eval({BasisTag::FRC, 2.0, 0}, 1.0), WithinRel(5.0 * std::acos(0.6), 1e-15));
    CHECK_THAT(basis_eval({BasisTag::FC0}, 3.0), WithinRel(8.0 * std::log(2.0), 1e-15));
    CHECK_THAT(basis_eval({BasisTag::FRS, 2.0, 0}, 1.0), WithinRel(-3.0 * std::log(3.0), 1e-15));
    double prev = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double v = std::abs(basis_eval({BasisTag::FC}, 1.0 - std::pow(10.0, -k)));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("real center angle passes through pi at h = |tau|")
{
    const BasisFunction b{BasisTag::FLC, -2.0, 1};
    CHECK_THAT(center_angle(b.tau, b.mu, 2.0), WithinRel(1.5 * std::numbers::pi, 1e-15));
    CHECK_THAT(basis_eval(b, 2.0), WithinRel(8.0 * 1.5 * std::numbers::pi, 1e-15));
}

TEST_CASE("basis domains")
{
    auto code = [](BasisFunction b, double h) {
        try {
            basis_eval(b, h);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::UnknownSubcommand;
    };
    CHECK(code({BasisTag::FC}, 1.0) == ErrorCode::DomainError);
    CHECK(code({BasisTag::FC0}, 0.5) == ErrorCode::DomainError);
    CHECK(code({BasisTag::FRS, 2.0, 0}, 2.5) == ErrorCode::DomainError);
    CHECK(code({BasisTag::FLC, 1.0, 0}, -0.1) == ErrorCode::DomainError);
}

TEST_CASE("crossing weights reduce to the corollary constants")
{
    for (const auto& [name, s] : fx::all_systems()) {
        const double bR = s.right.b, bL = s.left.b;
        for (double h : {1.1, 1.7}) {
            const auto w = crossing_weights(s, 0, h);
            INFO(name << " h " << h);
            CHECK_THAT(w[0], WithinRel(bR, 1e-14));
            CHECK_THAT(w[1], WithinRel(bR / bL, 1e-14));
            CHECK_THAT(w[2], WithinRel(bR, 1e-14));
            CHECK_THAT(w[3], WithinRel(1.0, 1e-14));
        }
        for (double h : {0.2, 0.8}) {
            const auto w1 = crossing_weights(s, 1, h), w2 = crossing_weights(s, 2, h);
            CHECK_THAT(w1[0], WithinRel(bR, 1e-14));
            CHECK_THAT(w1[1], WithinRel(1.0, 1e-14));
            CHECK_THAT(w2[0], WithinRel(1.0 / bL, 1e-14));
            CHECK_THAT(w2[1], WithinRel(1.0, 1e-14));
        }
    }
}

TEST_CASE("quadrature and closed forms reproduce the frozen oracle")
{
    const auto P = fx::example_perturbation();
    std::map<std::string, std::array<MelnikovForm, 3>> forms;
    for (const auto& f : frozen) {
        const auto s = fx::with(by_name(f.system), P);
        if (!forms.count(f.system)) forms[f.system] = closed_form_M(s);
        INFO(f.system << " M" << f.which << "(" << f.h << ")");
        CHECK_THAT(quadrature_M(s, f.which, f.h), WithinRel(f.M, 1e-11));
        CHECK_THAT(forms[f.system][f.which](f.h), WithinRel(f.M, 1e-9));
    }
}

TEST_CASE("printed alpha_2 coefficient for a single p10")
{
    const auto s = fx::with(fx::sss_homoclinic(), PerturbationCoeffs::unit(Coef::p10));
    const auto M1 = closed_form_M(s)[1];
    REQUIRE(M1.terms.size() == 3);
    CHECK(M1.terms[2].basis.tag == BasisTag::FRS);
    CHECK_THAT(M1.terms[2].k, WithinRel(0.5, 1e-15));
}

TEST_CASE("zero perturbation gives identically zero Melnikov functions")
{
    for (const auto& [name, s] : fx::all_systems()) {
        const auto forms = closed_form_M(s);
        for (const auto& f : forms)
            for (const auto& t : f.terms) CHECK(std::abs(t.k) < 1e-14);
        CHECK(quadrature_M(s, 0, 1.2) == 0.0);
        CHECK(quadrature_M(s, 1, 0.4) == 0.0);
        CHECK(quadrature_M(s, 2, 0.6) == 0.0);
    }
}

TEST_CASE("inert coefficients do not enter any Melnikov function")
{
    for (const auto& [name, s] : fx::all_systems())
        for (Coef c : inert_coefs) {
            const auto P = PerturbationCoeffs::unit(c);
            INFO(name << " " << coef_names[static_cast<int>(c)]);
            CHECK_THAT(quadrature_M(s, P, 0, 1.3), WithinAbs(0.0, 1e-10));
            CHECK_THAT(quadrature_M(s, P, 1, 0.5), WithinAbs(0.0, 1e-10));
            CHECK_THAT(quadrature_M(s, P, 2, 0.5), WithinAbs(0.0, 1e-10));
        }
}

TEST_CASE("Melnikov functions are linear in the perturbation")
{
    std::mt19937_64 rng(7);
    for (const auto& [name, s] : fx::all_systems()) {
        const auto A = fx::random_perturbation(rng), B = fx::random_perturbation(rng);
        const auto C = A + (-2.5) * B;
        for (int w = 0; w < 3; ++w) {
            const double h = w == 0 ? 1.25 : 0.45;
            const double lhs = quadrature_M(s, C, w, h);
            const double rhs = quadrature_M(s, A, w, h) - 2.5 * quadrature_M(s, B, w, h);
            CHECK_THAT(lhs, WithinAbs(rhs, 1e-10 * std::max(1.0, std::abs(rhs))));
        }
    }
}

TEST_CASE("closed forms agree with quadrature on random perturbations")
{
    std::mt19937_64 rng(11);
    for (const auto& [name, s0] : fx::all_systems())
        for (int draw = 0; draw < 3; ++draw) {
            const auto s = fx::with(s0, fx::random_perturbation(rng));
            FitDiagnostics diag;
            const auto forms = closed_form_M(s, &diag);
            const auto d = derive_constants(s);
            for (int w = 0; w < 3; ++w) {
                const auto J = annulus_interval(d, w);
                const double top = std::isfinite(J.hi) ? J.hi : 5.0;
                for (double u : {0.03, 0.31, 0.62, 0.97}) {
                    const double h = J.lo + u * (top - J.lo);
                    const double q = quadrature_M(s, w, h);
                    INFO(name << " M" << w << "(" << h << ")");
                    CHECK_THAT(forms[w](h), WithinAbs(q, 1e-8 * std::max(1.0, std::abs(q))));
                }
            }
        }
}

TEST_CASE("closed forms reject points outside the annulus")
{
    const auto forms = closed_form_M(fx::with(fx::sss_homoclinic(), fx::example_perturbation()));
    CHECK_THROWS_AS(forms[0](2.0), Error);
    CHECK_THROWS_AS(forms[1](1.0), Error);
    CHECK_THROWS_AS(forms[2](0.0), Error);
}

TEST_CASE("term counts follow the class theorems")
{
    for (const auto& [name, s] : fx::all_systems()) {
        const auto forms = closed_form_M(fx::with(s, fx::example_perturbation()));
        INFO(name);
        CHECK(forms[0].terms.size() == 4);
        CHECK(forms[1].terms.size() == 3);
        CHECK(forms[2].terms.size() == 3);
    }
}
