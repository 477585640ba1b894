#pragma once

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pwl/pwl.hpp"

namespace fx {

inline pwl::SystemSpec make(double aL, double bL, double cL, double betaL, double aR, double bR, double cR, double betaR)
{
    pwl::SystemSpec s;
    s.left = {aL, bL, cL, betaL};
    s.right = {aR, bR, cR, betaR};
    return s;
}

// The seven worked systems, same parameters as examples/*.json.
inline pwl::SystemSpec sss_homoclinic() { return make(1, 2.0 / 3, 0, 3, 0, 1, 1, -3); }
inline pwl::SystemSpec sss_heteroclinic() { return make(1, 1, 0, 2, 0, 1, 1, -3); }
inline pwl::SystemSpec css_virtual() { return make(1, 2, -1, -0.5, 0, 1, 1, -3); }
inline pwl::SystemSpec css_real() { return make(1, 2, -1, -4, 0, 1, 1, -3); }
inline pwl::SystemSpec csc_vv() { return make(1, 2, -1, -0.5, 0, 1, -1, 0); }
inline pwl::SystemSpec csc_vr() { return make(1, 2, -1, -3, 0, 1, -1, 0); }
inline pwl::SystemSpec csc_rr() { return make(1, 2, -1, -3, 0, 1, -1, 2); }

inline std::vector<std::pair<std::string, pwl::SystemSpec>> all_systems()
{
    return {{"sss_homoclinic", sss_homoclinic()}, {"sss_heteroclinic", sss_heteroclinic()},
            {"css_virtual", css_virtual()},       {"css_real", css_real()},
            {"csc_vv", csc_vv()},                 {"csc_vr", csc_vr()},
            {"csc_rr", csc_rr()}};
}

// Perturbation shipped in the example files.
inline pwl::PerturbationCoeffs example_perturbation()
{
    pwl::PerturbationCoeffs P;
    P.v = {0.3, -0.2, 0.5, 0.1, 0.4, -0.3, -0.6, 0.25, 0.2, 0.15, -0.35, 0.05, 0.45, -0.1, -0.4, 0.2, 0.3, -0.15};
    return P;
}

inline pwl::PerturbationCoeffs random_perturbation(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    pwl::PerturbationCoeffs P;
    for (auto& x : P.v) x = u(rng);
    return P;
}

inline pwl::SystemSpec with(pwl::SystemSpec s, const pwl::PerturbationCoeffs& P)
{
    s.perturbation = P;
    return s;
}

} // namespace fx
