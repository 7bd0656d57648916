#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lrising {

constexpr const char* kToolVersion = "0.1.0";

// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

/*!
 * Flat key-value configuration. params holds every key the command accepts,
 * with defaults filled in after parsing.
 */
struct ExperimentConfig
{
    std::string command;
    nlohmann::json params = nlohmann::json::object();

    bool operator==(const ExperimentConfig& o) const
    {
        return command == o.command && params == o.params;
    }

    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    std::uint64_t u64(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<int> int_list(const std::string& key) const;
    std::vector<double> real_list(const std::string& key) const;
};

// obj may carry a "command" key, which must then agree with command.
ExperimentConfig parse_config(const std::string& command, const nlohmann::json& obj);
ExperimentConfig parse_config_text(const std::string& command, const std::string& text);
ExperimentConfig parse_config_file(const std::string& command, const std::string& path);

// Canonical JSON text: sorted keys, command included.
std::string serialize(const ExperimentConfig& cfg);

// FNV-1a over serialize(cfg), hex.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace lrising
