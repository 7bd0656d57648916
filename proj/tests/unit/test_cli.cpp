#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrising/config.hpp"
#include "lrising/rng.hpp"
#include "lrising/run.hpp"

using namespace lrising;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json minimal(const std::string& cmd)
{
    if (cmd == "toy-scan")
        return {{"alpha", 0.75}, {"N_grid", {64, 128}}, {"samples", 10000}};
    if (cmd == "wllt-check")
        return {{"alpha", 0.75}, {"N_grid", {16}}};
    if (cmd == "peierls")
        return {{"alpha", 0.2}};
    if (cmd == "gibbs-exact" || cmd == "gibbs-mc")
        return {{"alpha", 0.5}, {"N", 3}};
    if (cmd == "metastate")
        return {{"alpha", 0.75}, {"N_grid", {4, 8}}};
    if (cmd == "dichotomy")
        return {{"alpha_list", {0.3, 0.7}}};
    return json::object();
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("lrising_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("defaults are filled")
    {
        auto cfg = parse_config("toy-scan", minimal("toy-scan"));
        CHECK(cfg.integer("Y") == 16 * 128);
        CHECK(cfg.real("beta") == 1.0);
        CHECK(cfg.u64("seed") == 1);
    }

    TEST_CASE("threshold alpha is rejected for the dichotomy")
    {
        CHECK_THROWS_AS(parse_config("dichotomy", json{{"alpha_list", {0.5}}}), ConfigError);
        CHECK_THROWS_AS(parse_config("dichotomy", json{{"alpha_list", {0.3, 0.46}}}), ConfigError);
    }

    TEST_CASE("bad keys name the key")
    {
        try {
            parse_config("peierls", json{{"alpha", 0.2}, {"mass", 3}});
            FAIL("unknown key accepted");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("'mass'") != std::string::npos);
        }
        try {
            parse_config("peierls", json{{"alpha", "x"}});
            FAIL("ill-typed key accepted");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("'alpha'") != std::string::npos);
        }
        try {
            parse_config("toy-scan", json{{"alpha", 0.7}});
            FAIL("missing key accepted");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("'N_grid'") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_config("gibbs-mc", json{{"alpha", 0.5}, {"N", 3}, {"sweeps", 5}, {"burn_in", 9}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_config("gibbs-exact", json{{"alpha", 0.5}, {"N", 12}}), ConfigError);
        CHECK_THROWS_AS(parse_config("nope", json::object()), ConfigError);
        CHECK_THROWS_AS(parse_config_text("peierls", "{alpha: 1"), ConfigError);
    }

    TEST_CASE("serialize and parse round trip")
    {
        CounterRng rng(77, 0);
        for (const auto& cmd : command_names()) {
            for (int trial = 0; trial < 20; ++trial) {
                json obj = minimal(cmd);
                obj["seed"] = rng.next_u64();
                if (obj.contains("alpha"))
                    obj["alpha"] = 0.05 + 0.4 * rng.uniform();
                if (cmd == "gibbs-mc") {
                    obj["burn_in"] = static_cast<int>(rng.next_u64() % 100);
                    obj["sweeps"] = 200 + static_cast<int>(rng.next_u64() % 1000);
                }
                auto cfg = parse_config(cmd, obj);
                CHECK(parse_config_text(cmd, serialize(cfg)) == cfg);
                CHECK(config_hash(parse_config_text(cmd, serialize(cfg))) == config_hash(cfg));
            }
        }
    }

    TEST_CASE("contours-verify passes and writes a manifest")
    {
        auto dir = scratch("cv");
        json obj = {{"N", 5}, {"output_dir", dir.string()}};
        std::ostringstream log;
        CHECK(run(parse_config("contours-verify", obj), log) == kExitPass);
        auto m = json::parse(slurp(dir / "manifest.json"));
        CHECK(m["exit_code"] == 0);
        CHECK(m["assertions"].size() == 1);
        CHECK(m["assertions"][0]["pass"] == true);
        CHECK(m["config_hash"].get<std::string>().size() == 16);
    }

    TEST_CASE("identical config and seed give identical csv bytes")
    {
        for (const std::string cmd : {"gibbs-exact", "metastate"}) {
            auto d1 = scratch(cmd + "1"), d2 = scratch(cmd + "2");
            json o1 = minimal(cmd), o2 = minimal(cmd);
            o1["output_dir"] = d1.string();
            o2["output_dir"] = d2.string();
            std::ostringstream log;
            run(parse_config(cmd, o1), log);
            run(parse_config(cmd, o2), log);
            auto m = json::parse(slurp(d1 / "manifest.json"));
            REQUIRE(!m["outputs"].empty());
            for (const auto& f : m["outputs"])
                CHECK(slurp(d1 / f.get<std::string>()) == slurp(d2 / f.get<std::string>()));
        }
    }

    TEST_CASE("assertion failure maps to exit code 1")
    {
        auto dir = scratch("rho");
        json obj = {{"output_dir", dir.string()}, {"M_max", 2}, {"betas", {1.0, 2.0}}, {"rho_max", 1e-300}};
        std::ostringstream log;
        CHECK(run(parse_config("rho-scan", obj), log) == kExitAssertion);
    }

    TEST_CASE("formatting round trips doubles")
    {
        for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23})
            CHECK(std::stod(fmt(v)) == v);
    }
}
