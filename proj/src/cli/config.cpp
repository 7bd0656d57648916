#include "lrising/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lrising/contour.hpp"

namespace lrising {

namespace {

using nlohmann::json;

enum class Kind { integer, u64, real, boolean, text, int_list, real_list };

struct KeySpec
{
    Kind kind;
    json fallback; // null means required
};

using Schema = std::map<std::string, KeySpec>;

const json required = nullptr;

Schema common()
{
    return {{"seed", {Kind::u64, 1}}, {"output_dir", {Kind::text, "out"}}};
}

Schema with(Schema base, const Schema& extra)
{
    for (const auto& kv : extra)
        base[kv.first] = kv.second;
    return base;
}

// thresholds default to the values used by the acceptance suite
const std::map<std::string, Schema>& schemas()
{
    static const std::map<std::string, Schema> s = {
        {"toy-scan", with(common(), {{"alpha", {Kind::real, required}},
                                     {"N_grid", {Kind::int_list, required}},
                                     {"samples", {Kind::integer, required}},
                                     {"beta", {Kind::real, 1.0}},
                                     {"K", {Kind::real, 1.0}},
                                     {"J", {Kind::real, 1.0}},
                                     {"Y", {Kind::integer, 0}},
                                     {"Y_factor", {Kind::integer, 0}},
                                     {"bootstrap", {Kind::integer, 200}},
                                     {"slope_tolerance", {Kind::real, 0.05}}})},
        {"wllt-check", with(common(), {{"alpha", {Kind::real, required}},
                                       {"N_grid", {Kind::int_list, required}},
                                       {"J", {Kind::real, 1.0}},
                                       {"Y", {Kind::integer, 0}},
                                       {"integral_tolerance", {Kind::real, 0.05}}})},
        {"contours-verify", with(common(), {{"N", {Kind::integer, 5}}, {"c", {Kind::real, 0.0}}})},
        {"peierls", with(common(), {{"alpha", {Kind::real, required}},
                                    {"N", {Kind::integer, 12}},
                                    {"M_max", {Kind::integer, 8}},
                                    {"J", {Kind::real, 1.0}},
                                    {"c", {Kind::real, 0.0}},
                                    {"stability_tolerance", {Kind::real, 0.05}}})},
        {"rho-scan", with(common(), {{"alpha", {Kind::real, 0.75}},
                                     {"betas", {Kind::real_list, json::array({2, 4, 8, 16})}},
                                     {"epsilon", {Kind::real, 0.1}},
                                     {"a", {Kind::real, 0.5}},
                                     {"N", {Kind::integer, 12}},
                                     {"n", {Kind::integer, 1}},
                                     {"M_max", {Kind::integer, 6}},
                                     {"J", {Kind::real, 1.0}},
                                     {"c", {Kind::real, 0.0}},
                                     {"minus_variant", {Kind::boolean, false}},
                                     {"rho_max", {Kind::real, 1e-6}}})},
        {"gibbs-exact", with(common(), {{"alpha", {Kind::real, required}},
                                        {"beta", {Kind::real, 1.0}},
                                        {"J", {Kind::real, 1.0}},
                                        {"N", {Kind::integer, required}},
                                        {"Y", {Kind::integer, 0}},
                                        {"bc", {Kind::text, "random"}},
                                        {"stream", {Kind::u64, 0}},
                                        {"X", {Kind::int_list, json::array({0})}}})},
        {"gibbs-mc", with(common(), {{"alpha", {Kind::real, required}},
                                     {"beta", {Kind::real, 1.0}},
                                     {"J", {Kind::real, 1.0}},
                                     {"N", {Kind::integer, required}},
                                     {"Y", {Kind::integer, 0}},
                                     {"bc", {Kind::text, "random"}},
                                     {"stream", {Kind::u64, 0}},
                                     {"X", {Kind::int_list, json::array({0})}},
                                     {"sweeps", {Kind::integer, 20000}},
                                     {"burn_in", {Kind::integer, 1000}},
                                     {"compare_exact", {Kind::boolean, true}}})},
        {"metastate", with(common(), {{"alpha", {Kind::real, required}},
                                      {"beta", {Kind::real, 1.0}},
                                      {"mode", {Kind::text, "toy"}},
                                      {"N_grid", {Kind::int_list, required}},
                                      {"tau", {Kind::real, 0.1}},
                                      {"X", {Kind::int_list, json::array({0})}},
                                      {"samples", {Kind::integer, 1000}},
                                      {"epsilon", {Kind::real, 0.1}},
                                      {"Y_factor", {Kind::integer, 16}},
                                      {"concentration_min", {Kind::real, 0.95}},
                                      {"neither_min", {Kind::real, 0.5}}})},
        {"null-recurrence", with(common(), {{"alpha", {Kind::real, 0.75}},
                                            {"beta", {Kind::real, 2.0}},
                                            {"N_max", {Kind::integer, 8192}},
                                            {"tau", {Kind::real, 0.1}},
                                            {"stream", {Kind::u64, 0}},
                                            {"J", {Kind::real, 1.0}},
                                            {"Y_factor", {Kind::integer, 16}},
                                            {"mixed_max", {Kind::real, 0.15}},
                                            {"pure_min", {Kind::real, 0.4}},
                                            {"pure_max", {Kind::real, 0.6}}})},
        {"dichotomy", with(common(), {{"alpha_list", {Kind::real_list, required}},
                                      {"beta", {Kind::real, 1.0}},
                                      {"N", {Kind::integer, 4096}},
                                      {"samples", {Kind::integer, 100000}},
                                      {"var_grid", {Kind::int_list,
                                                    json::array({64, 128, 256, 512, 1024, 2048, 4096})}},
                                      {"var_samples", {Kind::integer, 20000}},
                                      {"J", {Kind::real, 1.0}},
                                      {"Y_factor", {Kind::integer, 16}}})},
    };
    return s;
}

const char* kind_name(Kind k)
{
    switch (k) {
    case Kind::integer:
        return "an integer";
    case Kind::u64:
        return "a non-negative integer";
    case Kind::real:
        return "a number";
    case Kind::boolean:
        return "a boolean";
    case Kind::text:
        return "a string";
    case Kind::int_list:
        return "a list of integers";
    case Kind::real_list:
        return "a list of numbers";
    }
    return "?";
}

bool type_ok(Kind k, const json& v)
{
    auto all = [&](auto pred) {
        return v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), pred);
    };
    switch (k) {
    case Kind::integer:
        return v.is_number_integer();
    case Kind::u64:
        return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    case Kind::real:
        return v.is_number();
    case Kind::boolean:
        return v.is_boolean();
    case Kind::text:
        return v.is_string();
    case Kind::int_list:
        return all([](const json& e) { return e.is_number_integer(); });
    case Kind::real_list:
        return all([](const json& e) { return e.is_number(); });
    }
    return false;
}

json normalize(Kind k, const json& v)
{
    if (k == Kind::real)
        return v.get<double>();
    if (k == Kind::u64)
        return v.get<std::uint64_t>();
    if (k == Kind::real_list) {
        json out = json::array();
        for (const auto& e : v)
            out.push_back(e.get<double>());
        return out;
    }
    return v;
}

[[noreturn]] void fail(const std::string& msg)
{
    throw ConfigError(msg);
}

long max_of(const json& list)
{
    long m = 0;
    for (const auto& e : list)
        m = std::max(m, e.get<long>());
    return m;
}

void check_positive(const ExperimentConfig& c, const std::string& key)
{
    if (c.params.contains(key) && !(c.real(key) > 0.0))
        fail("key '" + key + "' must be positive");
}

void check_grid(const ExperimentConfig& c, const std::string& key)
{
    if (!c.params.contains(key))
        return;
    for (int v : c.int_list(key))
        if (v < 1)
            fail("key '" + key + "' must hold positive integers");
}

// Command-specific checks that do not need any computation.
void validate(ExperimentConfig& c)
{
    const std::string& cmd = c.command;
    auto& P = c.params;
    if (P.contains("alpha")) {
        double a = c.real("alpha");
        if (!(a >= 0.0 && a < 1.0))
            fail("key 'alpha' must lie in [0, 1)");
    }
    for (const char* k : {"beta", "J", "tau", "epsilon", "a"})
        if (P.contains(k) && !(c.real(k) >= 0.0))
            fail(std::string("key '") + k + "' must be non-negative");
    if (P.contains("J") && c.real("J") < 1.0)
        fail("key 'J' must be at least 1");
    check_positive(c, "samples");
    check_grid(c, "N_grid");
    check_grid(c, "var_grid");
    if (P.contains("N") && c.integer("N") < 1)
        fail("key 'N' must be at least 1");
    // Y defaults to 16 * max N
    if (P.contains("Y") && P["Y"].get<long>() == 0 && !(P.contains("Y_factor") && c.integer("Y_factor") > 0)) {
        long n = P.contains("N_grid") ? max_of(P["N_grid"]) : (P.contains("N") ? c.integer("N") : 1);
        P["Y"] = 16 * n;
    }
    if (P.contains("Y_factor") && c.integer("Y_factor") < 0)
        fail("key 'Y_factor' must be non-negative");
    if (P.contains("c") && c.real("c") == 0.0)
        P["c"] = static_cast<double>(default_c());
    if (P.contains("bc")) {
        try {
            bc_kind_from_string(c.text("bc"));
        } catch (const std::exception&) {
            fail("key 'bc' must be one of random, plus, minus, dobrushin, free");
        }
    }
    if (P.contains("X")) {
        auto X = c.int_list("X");
        if (!std::is_sorted(X.begin(), X.end()) ||
            std::adjacent_find(X.begin(), X.end()) != X.end())
            fail("key 'X' must be strictly increasing");
    }
    if (cmd == "gibbs-mc") {
        if (c.integer("burn_in") < 0)
            fail("key 'burn_in' must be non-negative");
        if (!(c.integer("sweeps") > c.integer("burn_in")))
            fail("key 'sweeps' must exceed 'burn_in'");
    }
    if (cmd == "gibbs-exact" || (cmd == "metastate" && c.text("mode") == "exact")) {
        long n = cmd == "gibbs-exact" ? c.integer("N") : max_of(P["N_grid"]);
        if (n > 11)
            fail("exact enumeration needs N <= 11; use gibbs-mc or toy mode");
    }
    if (cmd == "metastate" && c.text("mode") != "toy" && c.text("mode") != "exact")
        fail("key 'mode' must be toy or exact");
    if (cmd == "dichotomy")
        for (double a : c.real_list("alpha_list")) {
            if (a >= 0.45 && a <= 0.55)
                fail("key 'alpha_list': alpha = " + std::to_string(a) +
                     " lies in the excluded band [0.45, 0.55] around the threshold 1/2");
            if (!(a >= 0.0 && a < 1.0))
                fail("key 'alpha_list' entries must lie in [0, 1)");
        }
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& kv : schemas())
            n.push_back(kv.first);
        return n;
    }();
    return names;
}

double ExperimentConfig::real(const std::string& key) const { return params.at(key).get<double>(); }
long ExperimentConfig::integer(const std::string& key) const { return params.at(key).get<long>(); }
std::uint64_t ExperimentConfig::u64(const std::string& key) const
{
    return params.at(key).get<std::uint64_t>();
}
bool ExperimentConfig::boolean(const std::string& key) const { return params.at(key).get<bool>(); }
std::string ExperimentConfig::text(const std::string& key) const
{
    return params.at(key).get<std::string>();
}
std::vector<int> ExperimentConfig::int_list(const std::string& key) const
{
    return params.at(key).get<std::vector<int>>();
}
std::vector<double> ExperimentConfig::real_list(const std::string& key) const
{
    return params.at(key).get<std::vector<double>>();
}

ExperimentConfig parse_config(const std::string& command, const nlohmann::json& obj)
{
    auto it = schemas().find(command);
    if (it == schemas().end())
        fail("unknown command '" + command + "'");
    if (!obj.is_object())
        fail("config must be a flat JSON object");
    const Schema& schema = it->second;
    ExperimentConfig cfg;
    cfg.command = command;
    for (const auto& [key, value] : obj.items()) {
        if (key == "command") {
            if (!value.is_string() || value.get<std::string>() != command)
                fail("key 'command' does not match the requested command");
            continue;
        }
        auto s = schema.find(key);
        if (s == schema.end())
            fail("unknown key '" + key + "' for command " + command);
        if (!type_ok(s->second.kind, value))
            fail("key '" + key + "' must be " + kind_name(s->second.kind));
        cfg.params[key] = normalize(s->second.kind, value);
    }
    for (const auto& [key, spec] : schema) {
        if (cfg.params.contains(key))
            continue;
        if (spec.fallback.is_null())
            fail("missing required key '" + key + "' for command " + command);
        cfg.params[key] = normalize(spec.kind, spec.fallback);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& command, const std::string& text)
{
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(command, obj);
}

ExperimentConfig parse_config_file(const std::string& command, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(command, ss.str());
}

std::string serialize(const ExperimentConfig& cfg)
{
    json out = cfg.params;
    out["command"] = cfg.command;
    return out.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace lrising
