#pragma once

#include <map>
#include <sstream>
#include <string>

#include "llrk/csv.hpp"
#include "llrk/expm.hpp"

namespace llrk {

/// Declarative run configuration. Every field has a default; a config file
/// is a sequence of `key = value` lines with '#' comments. Unknown keys are
/// errors. Fixed-seed configs make all outputs byte-reproducible.
struct RunConfig {
    int example = 1;
    std::map<std::string, double> parameters; // keys "param.<name>"
    std::string scheme = "llrk4";
    double h = 0.0;    // > 0 selects a uniform step
    long steps = 0;    // > 0 selects a node count over [t0, T]
    PadeOrder pade{6, 6};
    std::string out;   // empty = stdout
    unsigned long long seed = 0;
    long refine = 16;  // starting refinement of the reference engine

    bool operator==(const RunConfig& o) const {
        return example == o.example && parameters == o.parameters && scheme == o.scheme &&
               h == o.h && steps == o.steps && pade.p == o.pade.p && pade.q == o.pade.q &&
               out == o.out && seed == o.seed && refine == o.refine;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& v, int line) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": expected a real number, got '" + v +
                          "'");
    }
    if (pos != v.size())
        throw ConfigError("line " + std::to_string(line) + ": trailing characters in number '" + v +
                          "'");
    return out;
}

inline long parse_int(const std::string& v, int line) {
    const double r = parse_real(v, line);
    const long i = static_cast<long>(r);
    if (double(i) != r)
        throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + v +
                          "'");
    return i;
}

} // namespace detail

/// Parses the declarative config format; diagnostics carry line numbers,
/// unknown and duplicate keys are rejected.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string body = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = detail::trim(body.substr(0, eq));
        const std::string value = detail::trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
        if (seen[key])
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "example") {
            const long id = detail::parse_int(value, line);
            if (id < 1 || id > 7)
                throw ConfigError("line " + std::to_string(line) + ": example must be in 1..7");
            cfg.example = static_cast<int>(id);
        } else if (key == "scheme") {
            cfg.scheme = value;
        } else if (key == "h") {
            cfg.h = detail::parse_real(value, line);
            if (cfg.h < 0.0)
                throw ConfigError("line " + std::to_string(line) + ": h must be >= 0");
        } else if (key == "steps") {
            cfg.steps = detail::parse_int(value, line);
            if (cfg.steps < 0)
                throw ConfigError("line " + std::to_string(line) + ": steps must be >= 0");
        } else if (key == "pade") {
            const auto comma = value.find(',');
            if (comma == std::string::npos)
                throw ConfigError("line " + std::to_string(line) + ": pade expects 'p,q'");
            cfg.pade.p = static_cast<int>(
                detail::parse_int(detail::trim(value.substr(0, comma)), line));
            cfg.pade.q = static_cast<int>(
                detail::parse_int(detail::trim(value.substr(comma + 1)), line));
            if (!cfg.pade.valid())
                throw ConfigError("line " + std::to_string(line) + ": need p,q >= 0 and p+q >= 1");
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned long long>(detail::parse_int(value, line));
        } else if (key == "refine") {
            const long r = detail::parse_int(value, line);
            if (r < 1)
                throw ConfigError("line " + std::to_string(line) + ": refine must be >= 1");
            cfg.refine = r;
        } else if (key.rfind("param.", 0) == 0) {
            const std::string name = key.substr(6);
            if (name.empty())
                throw ConfigError("line " + std::to_string(line) + ": empty parameter name");
            cfg.parameters[key] = detail::parse_real(value, line);
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    out += "example = " + std::to_string(cfg.example) + "\n";
    out += "h = " + fmt_double(cfg.h) + "\n";
    out += "out = " + cfg.out + "\n";
    out += "pade = " + std::to_string(cfg.pade.p) + "," + std::to_string(cfg.pade.q) + "\n";
    for (const auto& [key, value] : cfg.parameters) out += key + " = " + fmt_double(value) + "\n";
    out += "refine = " + std::to_string(cfg.refine) + "\n";
    out += "scheme = " + cfg.scheme + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "steps = " + std::to_string(cfg.steps) + "\n";
    return out;
}

/// Bare parameter names ("mu") from the "param.<name>" override keys.
inline std::map<std::string, double> bare_parameters(const RunConfig& cfg) {
    std::map<std::string, double> out;
    for (const auto& [key, value] : cfg.parameters) out[key.substr(6)] = value;
    return out;
}

} // namespace llrk
