#include "oscint/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace oscint {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
    throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) bad_key(where, item.key());
    }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        // byte offset -> line number for the error message
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i) {
            if (json_text[i] == '\n') ++line;
        }
        throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    check_keys(j, "", {"model", "lambdas", "hbar", "grid", "norms", "experiments", "output",
                       "seed", "threads"});
    RunConfig cfg;
    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model", {"name", "l", "r", "n"});
        read(m, "name", cfg.model.name);
        read(m, "l", cfg.model.l);
        read(m, "r", cfg.model.r);
        read(m, "n", cfg.model.n);
    }
    read(j, "lambdas", cfg.lambdas);
    if (j.contains("hbar")) {
        const json& h = j.at("hbar");
        check_keys(h, "hbar", {"j_min", "j_max"});
        read(h, "j_min", cfg.hbar.j_min);
        read(h, "j_max", cfg.hbar.j_max);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"points_per_wavelength", "max_points"});
        read(g, "points_per_wavelength", cfg.grid.points_per_wavelength);
        read(g, "max_points", cfg.grid.max_points);
    }
    read(j, "norms", cfg.norms);
    read(j, "experiments", cfg.experiments);
    read(j, "output", cfg.output);
    read(j, "seed", cfg.seed);
    read(j, "threads", cfg.threads);

    // Validation before any computation.
    static const std::set<std::string> known_models{"nondegenerate", "fold2", "type_lr"};
    if (!known_models.count(cfg.model.name)) {
        throw ConfigError("model.name '" + cfg.model.name + "' is not in the gallery");
    }
    if (cfg.model.n != 1 && cfg.model.n != 2) throw ConfigError("model.n must be 1 or 2");
    if (cfg.model.l < 0 || cfg.model.r < 0) throw ConfigError("model.l/r must be nonnegative");
    for (double lm : cfg.lambdas) {
        if (!(lm > 0.0)) throw ConfigError("lambdas must be positive");
    }
    if (cfg.hbar.j_min < 0 || cfg.hbar.j_max < cfg.hbar.j_min) {
        throw ConfigError("hbar range needs 0 <= j_min <= j_max");
    }
    if (!(cfg.grid.points_per_wavelength >= 1.0)) {
        throw ConfigError("grid.points_per_wavelength must be >= 1");
    }
    if (cfg.grid.max_points < 64) throw ConfigError("grid.max_points must be >= 64");
    static const std::set<std::string> known_norms{"l1", "l2", "linf", "schur"};
    for (const auto& nk : cfg.norms) {
        if (!known_norms.count(nk)) throw ConfigError("unknown norm kind '" + nk + "'");
    }
    static const std::set<std::string> known_experiments{
        "sweep", "theorem11", "theorem12", "damping", "convexity", "cotlar", "sublevel",
        "bounds-table"};
    for (const auto& ex : cfg.experiments) {
        if (!known_experiments.count(ex)) throw ConfigError("unknown experiment '" + ex + "'");
    }
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["model"] = {{"name", cfg.model.name}, {"l", cfg.model.l}, {"r", cfg.model.r},
                  {"n", cfg.model.n}};
    j["lambdas"] = cfg.lambdas;
    j["hbar"] = {{"j_min", cfg.hbar.j_min}, {"j_max", cfg.hbar.j_max}};
    j["grid"] = {{"points_per_wavelength", cfg.grid.points_per_wavelength},
                 {"max_points", cfg.grid.max_points}};
    j["norms"] = cfg.norms;
    j["experiments"] = cfg.experiments;
    j["output"] = cfg.output;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

bool RunOutcome::pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    for (const auto& f : fits) {
        if (!f.pass) return false;
    }
    return true;
}

}  // namespace oscint
