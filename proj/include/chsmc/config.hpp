#pragma once

// Flat key = value run configuration. '#' starts a comment; blank lines are
// ignored; unknown keys are rejected.

#include "chsmc/errors.hpp"
#include "chsmc/graphs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace chsmc {

/// mean + amp cos(mode pi x / Lx) cos(mode_y pi y / Ly) + uniform noise in [-noise, noise]
/// (the noise is re-centred to zero mean).
struct Profile {
    double mean = 0.0;
    double amp = 0.0;
    int mode = 1;
    int mode_y = 0;
    double noise = 0.0;
};

struct RunConfig {
    std::string experiment = "simulate";

    int dims = 1;
    std::size_t nx = 64;
    std::size_t ny = 64;
    double lx = 1.0;
    double ly = 1.0;

    double ell = 1.0;
    double nu = 1e-2;
    double gamma = 1.0;
    double a = 1.0;
    double b = 1.0;

    std::string graph = "polynomial";
    double pi_coeff = 1.0;
    std::string op = "zero";
    std::string operator_graph = "obstacle";
    double rho = 1.0;
    double growth_constant = 1.0;
    double eps_beta = 1e-2;
    double eps_A = 1e-2;
    std::string zeta_treatment = "resolvent";
    double smooth_eps = 0.0;

    double tau = 1e-3;
    double T = 1.0;
    std::size_t stride = 100;
    std::size_t snapshot_stride = 0;
    std::string out = "out";
    std::uint64_t seed = 1;

    Profile theta0;
    Profile phi0;
    Profile eta_star;
    Profile source;

    // smc / smc-sweep
    double tol_rel = 1e-3;
    double rho_pilot = 0.0;
    std::vector<double> rho_factors{1.2, 2.0, 4.0, 8.0};

    // contdep
    std::vector<double> contdep_deltas{1e-2, 1e-3, 1e-4};
    int contdep_mode = 1;

    // eps-study
    std::vector<double> eps_list{1e-1, 1e-2, 1e-3};

    /// Checks every numeric field against its module precondition and every
    /// name against the known kinds. Throws ValidationError naming the field.
    void validate() const {
        static const std::set<std::string> experiments{"simulate", "smc", "smc-sweep", "contdep", "selftest", "eps-study"};
        if (!experiments.contains(experiment)) throw ValidationError("experiment", "unknown experiment '" + experiment + "'");
        if (dims != 1 && dims != 2) throw ValidationError("dims", "must be 1 or 2");
        if (nx < 4) throw ValidationError("nx", "must be at least 4");
        if (dims == 2 && ny < 4) throw ValidationError("ny", "must be at least 4");
        auto positive = [](const char* name, double v) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(name, "must be positive");
        };
        positive("lx", lx);
        if (dims == 2) positive("ly", ly);
        positive("ell", ell);
        positive("nu", nu);
        positive("gamma", gamma);
        positive("tau", tau);
        if (!std::isfinite(a)) throw ValidationError("a", "must be finite");
        if (!std::isfinite(b)) throw ValidationError("b", "must be finite");
        if (!(T >= tau)) throw ValidationError("T", "must be at least tau");
        if (!(eps_beta > 0.0 && eps_beta <= 1.0)) throw ValidationError("eps_beta", "must lie in (0, 1]");
        if (!(eps_A > 0.0 && eps_A <= 1.0)) throw ValidationError("eps_A", "must lie in (0, 1]");
        if (!(smooth_eps >= 0.0)) throw ValidationError("smooth_eps", "must be non-negative");
        if (!(rho >= 0.0)) throw ValidationError("rho", "must be non-negative");
        if (!(rho_pilot >= 0.0)) throw ValidationError("rho_pilot", "must be non-negative");
        if (!(tol_rel > 0.0)) throw ValidationError("tol_rel", "must be positive");
        if (zeta_treatment != "resolvent" && zeta_treatment != "lagged")
            throw ValidationError("zeta_treatment", "must be 'resolvent' or 'lagged'");
        try {
            MonotoneGraph::from_name(graph);
        } catch (const ValidationError&) {
            throw ValidationError("graph", "unknown graph kind '" + graph + "'");
        }
        try {
            HilbertOperator::from_name(op, rho, operator_graph, growth_constant);
        } catch (const ValidationError& e) {
            throw ValidationError(e.field() == "graph" ? "operator_graph" : "operator", e.what());
        }
        if (experiment == "smc" || experiment == "smc-sweep") {
            if (!(b > 0.0)) throw ValidationError("b", "sliding mode needs b > 0");
            if (rho_factors.empty()) throw ValidationError("rho_factors", "must not be empty");
        }
        if (experiment == "contdep") {
            if (!(a > 0.0 && b > 0.0)) throw ValidationError("a", "continuous dependence needs a, b > 0");
            if (std::abs(a * ell - b) > 1e-12 * std::max(1.0, std::abs(b)))
                throw ValidationError("b", "continuous dependence needs a * ell = b");
            if (contdep_deltas.empty()) throw ValidationError("contdep_deltas", "must not be empty");
        }
        if (experiment == "eps-study") {
            if (eps_list.size() < 2) throw ValidationError("eps_list", "needs at least two levels");
            for (double e : eps_list)
                if (!(e > 0.0 && e <= 1.0)) throw ValidationError("eps_list", "levels must lie in (0, 1]");
        }
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(line, "expected a number, got '" + std::string(text) + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view text, std::size_t line) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(line, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

inline std::vector<double> parse_list(std::string_view text, std::size_t line) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_double(trim(text.substr(0, comma)), line));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    using detail::parse_double;
    using Setter = void (*)(RunConfig&, std::string_view, std::size_t);
#define CHSMC_DOUBLE(key, member) {key, [](RunConfig& c, std::string_view v, std::size_t l) { c.member = parse_double(v, l); }}
#define CHSMC_SIZE(key, member) {key, [](RunConfig& c, std::string_view v, std::size_t l) { c.member = detail::parse_int<std::size_t>(v, l); }}
#define CHSMC_INT(key, member) {key, [](RunConfig& c, std::string_view v, std::size_t l) { c.member = detail::parse_int<int>(v, l); }}
#define CHSMC_STRING(key, member) {key, [](RunConfig& c, std::string_view v, std::size_t) { c.member = std::string(v); }}
#define CHSMC_LIST(key, member) {key, [](RunConfig& c, std::string_view v, std::size_t l) { c.member = detail::parse_list(v, l); }}
#define CHSMC_PROFILE(prefix, member)        \
    CHSMC_DOUBLE(prefix "_mean", member.mean), \
    CHSMC_DOUBLE(prefix "_amp", member.amp),   \
    CHSMC_INT(prefix "_mode", member.mode),    \
    CHSMC_INT(prefix "_mode_y", member.mode_y), \
    CHSMC_DOUBLE(prefix "_noise", member.noise)
    static const std::map<std::string_view, Setter> setters{
        CHSMC_STRING("experiment", experiment),
        CHSMC_INT("dims", dims),
        CHSMC_SIZE("nx", nx),
        CHSMC_SIZE("ny", ny),
        CHSMC_DOUBLE("lx", lx),
        CHSMC_DOUBLE("ly", ly),
        CHSMC_DOUBLE("ell", ell),
        CHSMC_DOUBLE("nu", nu),
        CHSMC_DOUBLE("gamma", gamma),
        CHSMC_DOUBLE("a", a),
        CHSMC_DOUBLE("b", b),
        CHSMC_STRING("graph", graph),
        CHSMC_DOUBLE("pi_coeff", pi_coeff),
        CHSMC_STRING("operator", op),
        CHSMC_STRING("operator_graph", operator_graph),
        CHSMC_DOUBLE("rho", rho),
        CHSMC_DOUBLE("growth_constant", growth_constant),
        CHSMC_DOUBLE("eps_beta", eps_beta),
        CHSMC_DOUBLE("eps_A", eps_A),
        CHSMC_STRING("zeta_treatment", zeta_treatment),
        CHSMC_DOUBLE("smooth_eps", smooth_eps),
        CHSMC_DOUBLE("tau", tau),
        CHSMC_DOUBLE("T", T),
        CHSMC_SIZE("stride", stride),
        CHSMC_SIZE("snapshot_stride", snapshot_stride),
        CHSMC_STRING("out", out),
        {"seed", [](RunConfig& c, std::string_view v, std::size_t l) { c.seed = detail::parse_int<std::uint64_t>(v, l); }},
        CHSMC_PROFILE("theta0", theta0),
        CHSMC_PROFILE("phi0", phi0),
        CHSMC_PROFILE("eta_star", eta_star),
        CHSMC_PROFILE("source", source),
        CHSMC_DOUBLE("tol_rel", tol_rel),
        CHSMC_DOUBLE("rho_pilot", rho_pilot),
        CHSMC_LIST("rho_factors", rho_factors),
        CHSMC_LIST("contdep_deltas", contdep_deltas),
        CHSMC_INT("contdep_mode", contdep_mode),
        CHSMC_LIST("eps_list", eps_list),
    };
#undef CHSMC_PROFILE
#undef CHSMC_LIST
#undef CHSMC_STRING
#undef CHSMC_INT
#undef CHSMC_SIZE
#undef CHSMC_DOUBLE

    std::set<std::string, std::less<>> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view content = raw;
        if (const auto hash = content.find('#'); hash != std::string_view::npos) content = content.substr(0, hash);
        content = detail::trim(content);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
        const std::string_view key = detail::trim(content.substr(0, eq));
        const std::string_view value = detail::trim(content.substr(eq + 1));
        if (key.empty()) throw ParseError(line, "missing key");
        if (value.empty()) throw ParseError(line, "missing value for '" + std::string(key) + "'");
        const auto it = setters.find(key);
        if (it == setters.end()) throw ParseError(line, "unknown key '" + std::string(key) + "'");
        if (!seen.emplace(key).second) throw ParseError(line, "duplicate key '" + std::string(key) + "'");
        it->second(cfg, value, line);
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("config", "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << is.rdbuf();
    return parse_config(buffer.str());
}

} // namespace chsmc
