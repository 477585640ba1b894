#include <catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"

using namespace pwl;
using Catch::Matchers::WithinAbs;

TEST_CASE("flow at t = 0 is the identity")
{
    const auto s = fx::csc_rr();
    for (Zone z : {Zone::Left, Zone::Center, Zone::Right}) {
        const double x0 = z == Zone::Left ? -1.3 : z == Zone::Right ? 1.3 : 0.3;
        const Point p = zone_flow(s, z, {x0, -0.7}, 0.0);
        CHECK_THAT(p.x, WithinAbs(x0, 1e-15));
        CHECK_THAT(p.y, WithinAbs(-0.7, 1e-15));
    }
}

TEST_CASE("flows conserve the zone Hamiltonian")
{
    for (const auto& [name, s] : fx::all_systems())
        for (Zone z : {Zone::Left, Zone::Center, Zone::Right}) {
            const Point p0{z == Zone::Left ? -1.5 : z == Zone::Right ? 1.5 : 0.5, 0.4};
            const double H0 = hamiltonian(s, z, p0);
            for (double t : {0.1, 0.7, 2.3}) {
                INFO(name << " zone " << to_string(z) << " t " << t);
                CHECK_THAT(hamiltonian(s, z, zone_flow(s, z, p0, t)), WithinAbs(H0, 1e-11 * std::max(1.0, std::abs(H0))));
            }
        }
}

TEST_CASE("flight times close every arc at its end point")
{
    for (const auto& [name, s] : fx::all_systems()) {
        const auto d = derive_constants(s);
        for (int w = 0; w < 3; ++w) {
            const auto J = annulus_interval(d, w);
            const double top = std::isfinite(J.hi) ? J.hi : 3.0;
            for (double u : {0.1, 0.5, 0.9}) {
                const double h = J.lo + u * (top - J.lo);
                for (const auto& arc : periodic_orbit(s, w, h)) {
                    INFO(name << " annulus " << w << " h " << h);
                    const Point e = arc.at(arc.duration);
                    CHECK_THAT(e.x, WithinAbs(arc.end.x, 1e-10));
                    CHECK_THAT(e.y, WithinAbs(arc.end.y, 1e-10));
                    const Point mid = arc.at(0.5 * arc.duration);
                    CHECK(in_zone(arc.zone, mid));
                }
            }
        }
    }
}

TEST_CASE("three-zone orbit crossing ordinates")
{
    const auto orbit = periodic_orbit(fx::sss_homoclinic(), 0, 1.5);
    REQUIRE(orbit.size() == 4);
    const double ys[4] = {1.5, -1.5, -1.5, 1.5};
    const Zone zs[4] = {Zone::Right, Zone::Center, Zone::Left, Zone::Center};
    for (int i = 0; i < 4; ++i) {
        CHECK(orbit[i].start.y == ys[i]);
        CHECK(orbit[i].zone == zs[i]);
    }
}

TEST_CASE("two-zone orbit arcs")
{
    const auto b = periodic_orbit(fx::sss_homoclinic(), 1, 0.5);
    REQUIRE(b.size() == 2);
    CHECK(b[0].arc == Arc::BB1);
    CHECK(b[0].zone == Zone::Right);
    CHECK(b[1].arc == Arc::B1B);
    CHECK(b[1].zone == Zone::Center);
}

TEST_CASE("central flight time vanishes as h goes to zero")
{
    const auto s = fx::sss_homoclinic();
    CHECK(flight_time(s, Arc::B1B, 1e-9) < 3e-9);
    CHECK_THAT(flight_time(s, Arc::B1B, 0.5), WithinAbs(std::log(3.0), 1e-15));
}

TEST_CASE("annulus boundaries are rejected")
{
    const auto s = fx::sss_homoclinic();
    auto code = [&](int w, double h) {
        try {
            periodic_orbit(s, w, h);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::UnknownSubcommand;
    };
    CHECK(code(0, 1.0) == ErrorCode::OutOfAnnulus);
    CHECK(code(0, 2.0) == ErrorCode::OutOfAnnulus);
    CHECK(code(1, 1.0) == ErrorCode::OutOfAnnulus);
    CHECK(code(2, 0.0) == ErrorCode::OutOfAnnulus);
    CHECK(code(3, 0.5) == ErrorCode::DomainError);
}

TEST_CASE("real center flight time exceeds half a turn")
{
    // mu = 1: the arc wraps around the equilibrium inside the zone.
    const auto s = fx::csc_rr();
    const auto R = outer_constants(s.right, Side::Right);
    REQUIRE(R.mu == 1);
    const double t = flight_time(s, Arc::BB1, 0.5);
    CHECK(t > std::numbers::pi / R.omega);
    CHECK(t < 2 * std::numbers::pi / R.omega);
}
