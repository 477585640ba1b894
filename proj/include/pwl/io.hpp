#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pwl/error.hpp"
#include "pwl/system.hpp"

namespace pwl {

// Shortest text that reads back to the same double.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline ZoneParams zone_from_json(const nlohmann::json& j, const char* name)
{
    if (!j.contains(name) || !j[name].is_object()) throw Error(ErrorCode::ParseError, std::string("missing zone object '") + name + "'");
    const auto& z = j[name];
    ZoneParams p;
    auto get = [&](const char* key, double& dst) {
        if (!z.contains(key)) throw Error(ErrorCode::ParseError, std::string(name) + "." + key + " is missing");
        if (!z[key].is_number()) throw Error(ErrorCode::ParseError, std::string(name) + "." + key + " is not a number");
        dst = z[key].get<double>();
    };
    get("a", p.a);
    get("b", p.b);
    get("c", p.c);
    get("beta", p.beta);
    return p;
}

} // namespace detail

inline SystemSpec spec_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
    SystemSpec s;
    s.left = detail::zone_from_json(j, "left");
    s.right = detail::zone_from_json(j, "right");
    if (j.contains("perturbation")) {
        const auto& p = j["perturbation"];
        if (!p.is_object()) throw Error(ErrorCode::ParseError, "perturbation must be an object");
        for (auto it = p.begin(); it != p.end(); ++it) {
            bool known = false;
            for (std::size_t i = 0; i < coef_names.size(); ++i)
                if (it.key() == coef_names[i]) {
                    if (!it.value().is_number()) throw Error(ErrorCode::ParseError, "perturbation." + it.key() + " is not a number");
                    s.perturbation.v[i] = it.value().get<double>();
                    known = true;
                }
            if (!known) throw Error(ErrorCode::ParseError, "unknown perturbation coefficient '" + it.key() + "'");
        }
    }
    return s;
}

inline SystemSpec parse_spec(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return spec_from_json(j);
}

inline SystemSpec load_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

// Hand-written so every number carries 17 significant digits.
inline std::string perturbation_to_json(const PerturbationCoeffs& P, const std::string& indent = "  ")
{
    std::string out = "{\n";
    for (std::size_t i = 0; i < coef_names.size(); ++i) {
        out += indent + "  \"" + coef_names[i] + "\": " + fmt17(P.v[i]);
        out += i + 1 < coef_names.size() ? ",\n" : "\n";
    }
    return out + indent + "}";
}

inline std::string spec_to_json(const SystemSpec& s)
{
    auto zone = [](const ZoneParams& z) {
        return "{\"a\": " + fmt17(z.a) + ", \"b\": " + fmt17(z.b) + ", \"c\": " + fmt17(z.c) + ", \"beta\": " + fmt17(z.beta) + "}";
    };
    return "{\n  \"left\": " + zone(s.left) + ",\n  \"right\": " + zone(s.right) +
           ",\n  \"perturbation\": " + perturbation_to_json(s.perturbation) + "\n}\n";
}

} // namespace pwl
