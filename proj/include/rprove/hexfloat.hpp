#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "rprove/errors.hpp"
#include "rprove/interval.hpp"

namespace rprove {

// Bit-exact text form of a double ("%a").
inline std::string to_hex(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

inline double from_hex(const std::string& s)
{
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
        throw DomainError("not a floating-point literal: '" + s + "'");
    }
    return x;
}

inline nlohmann::json interval_json(const Interval& a) { return nlohmann::json::array({to_hex(a.lo()), to_hex(a.hi())}); }

inline Interval interval_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 2) {
        throw DomainError("interval must be a two-element array");
    }
    auto endpoint = [](const nlohmann::json& e) { return e.is_string() ? from_hex(e.get<std::string>()) : e.get<double>(); };
    return Interval(endpoint(j[0]), endpoint(j[1]));
}

} // namespace rprove
