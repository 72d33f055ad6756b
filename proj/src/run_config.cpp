#include "orbivortex/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace orbivortex::cli {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, size_t off) {
    int line = 1;
    for (size_t i = 0; i < off && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

/** Line of the first occurrence of the quoted key; 0 when absent. */
int line_of_key(const std::string& text, const std::string& key) {
    size_t pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return line_of_offset(text, pos);
}

[[noreturn]] void fail_at(const std::string& name, int line, const std::string& msg) {
    std::ostringstream os;
    os << name;
    if (line > 0) os << ':' << line;
    os << ": " << msg;
    throw ConfigError(os.str());
}

struct Checker {
    const std::string& name;
    const std::string& text;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        fail_at(name, line_of_key(text, key), msg);
    }

    void reject_unknown(const json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) const {
        for (const auto& [key, value] : obj.items()) {
            (void)value;
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                    return key == a;
                }) == allowed.end())
                fail(key, "unknown key \"" + key + "\" in " + where);
        }
    }

    const json& member(const json& obj, const std::string& outer, const char* key) const {
        if (!obj.contains(key))
            fail(outer, std::string("missing required key \"") + key + "\"");
        return obj.at(key);
    }

    double number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail(key, "\"" + key + "\" must be a number");
        return v.get<double>();
    }

    long long integer(const json& v, const std::string& key) const {
        if (!v.is_number_integer()) fail(key, "\"" + key + "\" must be an integer");
        return v.get<long long>();
    }
};

} // namespace

void RunConfig::fail(const std::string& key, const std::string& msg) const {
    fail_at(source_name, line_of_key(source_text, key), msg);
}

void RunConfig::require_tau() const {
    if (!has_tau) fail("action", "this command needs \"tau\" in the action block (or --tau)");
}

void RunConfig::require_divisor() const {
    if (!has_divisor)
        fail("surface", "this command needs a \"divisor\" key (an empty list is the vacuum)");
}

void RunConfig::require_eps_list() const {
    if (eps_list.empty()) fail("surface", "this command needs a non-empty \"eps_list\"");
}

void RunConfig::require_tau_grid() const {
    if (tau_grid.empty()) fail("surface", "this command needs a non-empty \"tau_grid\"");
}

void RunConfig::require_degree() const {
    if (!has_degree_n && !has_divisor)
        fail("surface", "this command needs \"n\" (a bundle degree) or a \"divisor\"");
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail_at(name, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                std::string("JSON parse error: ") + e.what());
    }
    Checker ck{name, text};
    if (!root.is_object()) fail_at(name, 1, "top level must be a JSON object");
    ck.reject_unknown(root, "the top level",
                      {"surface", "action", "divisor", "solver", "eps", "eps_list",
                       "tau_grid", "exclusion_radius", "samples", "n", "seed", "output",
                       "csv_output", "threads"});

    RunConfig cfg;
    cfg.source_name = name;
    cfg.source_text = text;

    // surface block (required)
    const json& surf = ck.member(root, "surface", "surface");
    if (!surf.is_object()) ck.fail("surface", "\"surface\" must be an object");
    ck.reject_unknown(surf, "the surface block", {"kind", "m", "resolution", "periods"});
    const json& kind = ck.member(surf, "surface", "kind");
    if (!kind.is_string()) ck.fail("kind", "\"kind\" must be a string");
    cfg.kind = kind.get<std::string>();
    if (cfg.kind != "torus" && cfg.kind != "football")
        ck.fail("kind", "\"kind\" must be \"torus\" or \"football\"");
    cfg.resolution = int(ck.integer(ck.member(surf, "surface", "resolution"), "resolution"));
    if (cfg.resolution < 2) ck.fail("resolution", "\"resolution\" must be at least 2");
    if (cfg.kind == "football") {
        cfg.cone_order = int(ck.integer(ck.member(surf, "surface", "m"), "m"));
        if (cfg.cone_order < 2) ck.fail("m", "cone order \"m\" must be at least 2");
        if (surf.contains("periods"))
            ck.fail("periods", "\"periods\" only applies to the torus");
    } else {
        if (surf.contains("m")) ck.fail("m", "\"m\" only applies to the football");
        cfg.period1 = cfg.period2 = 2 * std::numbers::pi;
        if (surf.contains("periods")) {
            const json& p = surf.at("periods");
            if (!p.is_array() || p.size() != 2)
                ck.fail("periods", "\"periods\" must be a [L1, L2] pair");
            cfg.period1 = ck.number(p[0], "periods");
            cfg.period2 = ck.number(p[1], "periods");
            if (!(cfg.period1 > 0) || !(cfg.period2 > 0))
                ck.fail("periods", "periods must be positive");
        }
    }

    // action block (required)
    const json& act = ck.member(root, "surface", "action");
    if (!act.is_object()) ck.fail("action", "\"action\" must be an object");
    ck.reject_unknown(act, "the action block", {"a", "tau"});
    cfg.weight_a = ck.integer(ck.member(act, "action", "a"), "a");
    if (cfg.weight_a < 1) ck.fail("a", "circle-action weight \"a\" must be a positive integer");
    if (act.contains("tau")) {
        cfg.tau = ck.number(act.at("tau"), "tau");
        if (!(cfg.tau > 0)) ck.fail("tau", "\"tau\" must be positive");
        cfg.has_tau = true;
    }

    if (root.contains("divisor")) {
        const json& div = root.at("divisor");
        if (!div.is_array()) ck.fail("divisor", "\"divisor\" must be a list of [c1, c2, mult]");
        for (const json& p : div) {
            if (!p.is_array() || p.size() != 3)
                ck.fail("divisor", "each divisor entry must be [c1, c2, mult]");
            DivisorPointConfig d;
            d.c1 = ck.number(p[0], "divisor");
            d.c2 = ck.number(p[1], "divisor");
            d.mult = int(ck.integer(p[2], "divisor"));
            if (d.mult < 1) ck.fail("divisor", "divisor multiplicities must be >= 1");
            cfg.divisor.push_back(d);
        }
        cfg.has_divisor = true;
    }

    if (root.contains("solver")) {
        const json& so = root.at("solver");
        if (!so.is_object()) ck.fail("solver", "\"solver\" must be an object");
        ck.reject_unknown(so, "the solver block", {"tol", "max_newton", "cg_tol_factor"});
        if (so.contains("tol")) {
            cfg.solver_opts.tol = ck.number(so.at("tol"), "tol");
            if (!(cfg.solver_opts.tol > 0)) ck.fail("tol", "\"tol\" must be positive");
        }
        if (so.contains("max_newton")) {
            cfg.solver_opts.max_newton = int(ck.integer(so.at("max_newton"), "max_newton"));
            if (cfg.solver_opts.max_newton < 1)
                ck.fail("max_newton", "\"max_newton\" must be >= 1");
        }
        if (so.contains("cg_tol_factor")) {
            cfg.solver_opts.cg_tol_factor = ck.number(so.at("cg_tol_factor"), "cg_tol_factor");
            if (!(cfg.solver_opts.cg_tol_factor > 0))
                ck.fail("cg_tol_factor", "\"cg_tol_factor\" must be positive");
        }
    }

    if (root.contains("eps")) {
        cfg.eps = ck.number(root.at("eps"), "eps");
        if (!(cfg.eps > 0)) ck.fail("eps", "\"eps\" must be positive");
    }
    if (root.contains("eps_list")) {
        const json& el = root.at("eps_list");
        if (!el.is_array() || el.empty())
            ck.fail("eps_list", "\"eps_list\" must be a non-empty list");
        for (const json& v : el) {
            double e = ck.number(v, "eps_list");
            if (!(e > 0)) ck.fail("eps_list", "eps values must be positive");
            if (!cfg.eps_list.empty() && !(e < cfg.eps_list.back()))
                ck.fail("eps_list", "\"eps_list\" must be strictly decreasing");
            cfg.eps_list.push_back(e);
        }
    }
    if (root.contains("tau_grid")) {
        const json& tg = root.at("tau_grid");
        if (!tg.is_array() || tg.empty())
            ck.fail("tau_grid", "\"tau_grid\" must be a non-empty list");
        for (const json& v : tg) {
            double t = ck.number(v, "tau_grid");
            if (!(t > 0)) ck.fail("tau_grid", "tau values must be positive");
            if (!cfg.tau_grid.empty() && !(t > cfg.tau_grid.back()))
                ck.fail("tau_grid", "\"tau_grid\" must be strictly ascending");
            cfg.tau_grid.push_back(t);
        }
    }
    if (root.contains("exclusion_radius")) {
        cfg.exclusion_radius = ck.number(root.at("exclusion_radius"), "exclusion_radius");
        if (!(cfg.exclusion_radius >= 0))
            ck.fail("exclusion_radius", "\"exclusion_radius\" must be >= 0");
    }
    if (root.contains("samples")) {
        cfg.samples = int(ck.integer(root.at("samples"), "samples"));
        if (cfg.samples < 0) ck.fail("samples", "\"samples\" must be >= 0");
    }
    if (root.contains("n")) {
        cfg.degree_n = ck.integer(root.at("n"), "n");
        if (cfg.degree_n < 0) ck.fail("n", "degree \"n\" must be >= 0");
        cfg.has_degree_n = true;
    }
    if (root.contains("seed")) {
        long long s = ck.integer(root.at("seed"), "seed");
        if (s < 0) ck.fail("seed", "\"seed\" must be >= 0");
        cfg.seed = std::uint64_t(s);
    }
    if (root.contains("output")) {
        if (!root.at("output").is_string()) ck.fail("output", "\"output\" must be a string");
        cfg.output = root.at("output").get<std::string>();
    }
    if (root.contains("csv_output")) {
        if (!root.at("csv_output").is_string())
            ck.fail("csv_output", "\"csv_output\" must be a string");
        cfg.csv_output = root.at("csv_output").get<std::string>();
    }
    if (root.contains("threads")) {
        cfg.threads = int(ck.integer(root.at("threads"), "threads"));
        if (cfg.threads < 1) ck.fail("threads", "\"threads\" must be >= 1");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

Surface make_surface(const RunConfig& cfg) {
    try {
        if (cfg.kind == "football")
            return Surface::football(cfg.cone_order, cfg.resolution, 2 * cfg.resolution);
        return Surface::torus(cfg.period1, cfg.period2, cfg.resolution);
    } catch (const std::invalid_argument& e) {
        cfg.fail("surface", std::string("invalid surface: ") + e.what());
    }
}

solver::Divisor make_divisor(const Surface& S, const RunConfig& cfg) {
    std::vector<solver::DivisorInput> pts;
    pts.reserve(cfg.divisor.size());
    for (const auto& d : cfg.divisor) pts.push_back({d.c1, d.c2, d.mult});
    try {
        return solver::make_divisor(S, pts);
    } catch (const std::invalid_argument& e) {
        cfg.fail("divisor", std::string("invalid divisor: ") + e.what());
    }
}

nlohmann::json config_json(const RunConfig& cfg, int resolved_threads) {
    nlohmann::json surf{{"kind", cfg.kind}, {"resolution", cfg.resolution}};
    if (cfg.kind == "football")
        surf["m"] = cfg.cone_order;
    else
        surf["periods"] = {cfg.period1, cfg.period2};

    nlohmann::json act{{"a", cfg.weight_a}};
    if (cfg.has_tau) act["tau"] = cfg.tau;

    nlohmann::json j{{"surface", surf},
                     {"action", act},
                     {"solver",
                      {{"tol", cfg.solver_opts.tol},
                       {"max_newton", cfg.solver_opts.max_newton},
                       {"cg_tol_factor", cfg.solver_opts.cg_tol_factor}}},
                     {"eps", cfg.eps},
                     {"seed", cfg.seed},
                     {"samples", cfg.samples},
                     {"exclusion_radius", cfg.exclusion_radius},
                     {"threads", resolved_threads}};
    if (cfg.has_divisor) {
        nlohmann::json div = nlohmann::json::array();
        for (const auto& d : cfg.divisor) div.push_back({d.c1, d.c2, d.mult});
        j["divisor"] = div;
    }
    if (!cfg.eps_list.empty()) j["eps_list"] = cfg.eps_list;
    if (!cfg.tau_grid.empty()) j["tau_grid"] = cfg.tau_grid;
    if (cfg.has_degree_n) j["n"] = cfg.degree_n;
    if (!cfg.output.empty()) j["output"] = cfg.output;
    if (!cfg.csv_output.empty()) j["csv_output"] = cfg.csv_output;
    return j;
}

int resolve_threads(int flag_threads, const RunConfig& cfg) {
    if (flag_threads > 0) return flag_threads;
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("ORBIVORTEX_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

} // namespace orbivortex::cli
