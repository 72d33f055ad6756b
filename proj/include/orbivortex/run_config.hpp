#pragma once

#include "orbivortex/solver.hpp"
#include "orbivortex/surface.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbivortex::cli {

/** Configuration failure with a "file:line: message" text; maps to the
 * malformed-input process exit code. */
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisorPointConfig {
    double c1 = 0, c2 = 0;
    int mult = 1;
};

/** A fully type-checked run configuration. Parsing is strict: unknown keys
 * anywhere are rejected, every value is range-checked, and all messages
 * carry the line of the offending key. Which keys must be present depends
 * on the command; `require_*` helpers enforce that at dispatch time. */
struct RunConfig {
    // surface block
    std::string kind = "torus";
    int cone_order = 0;   // football only
    int resolution = 0;   // torus grid n, or football polar point count
    double period1 = 0, period2 = 0; // torus only; 0 = default 2 pi
    // action block
    long long weight_a = 1;
    double tau = 0;
    bool has_tau = false;
    // optional blocks
    std::vector<DivisorPointConfig> divisor;
    bool has_divisor = false;
    solver::SolveOptions solver_opts;
    double eps = 1.0;
    std::vector<double> eps_list;
    std::vector<double> tau_grid;
    double exclusion_radius = 0.5;
    int samples = 20;
    long long degree_n = 0;
    bool has_degree_n = false;
    std::uint64_t seed = 1;
    std::string output;
    std::string csv_output;
    int threads = 0; // 0 = unset (env or hardware decides)

    std::string source_name; // config path, for error messages
    std::string source_text; // raw text, for line lookups

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;
    void require_tau() const;
    void require_divisor() const;
    void require_eps_list() const;
    void require_tau_grid() const;
    void require_degree() const;
};

RunConfig parse_config_text(const std::string& text, const std::string& name);
RunConfig parse_config_file(const std::string& path);

/** Build the configured surface; constructor rejections become ConfigError
 * pointing at the surface block. */
Surface make_surface(const RunConfig& cfg);

solver::Divisor make_divisor(const Surface& S, const RunConfig& cfg);

/** The fully resolved configuration (defaults materialized) for report
 * embedding; `threads` is the value actually used. */
nlohmann::json config_json(const RunConfig& cfg, int resolved_threads);

/** Thread-count resolution: explicit flag, then config, then the
 * ORBIVORTEX_THREADS environment variable, then hardware concurrency. */
int resolve_threads(int flag_threads, const RunConfig& cfg);

} // namespace orbivortex::cli
