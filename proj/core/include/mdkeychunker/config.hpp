#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "mdkeychunker/llm_client.hpp"
#include "mdkeychunker/model.hpp"

namespace mdkeychunker {

/// Invalid configuration value. `variable()` is the environment variable
/// name the value belongs to.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string variable, const std::string& message)
        : std::runtime_error(variable + ": " + message), variable_(std::move(variable)) {}

    const std::string& variable() const noexcept { return variable_; }

private:
    std::string variable_;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

EnvLookup process_env();
EnvLookup env_from_map(std::map<std::string, std::string> values);

/// Command-line overrides; unset members leave the env/default value alone.
struct ConfigOverrides {
    std::optional<std::size_t> min_chunk_size;
    std::optional<std::size_t> max_chunk_size;
    std::optional<bool> merge_by_keys;
    std::optional<std::size_t> max_merged_size;
    std::optional<std::size_t> min_orphan_size;
    std::optional<std::size_t> rolling_key_capacity;
    std::optional<bool> rolling_keys_enabled;
    std::optional<std::string> provider;
    std::optional<std::string> base_url;
    std::optional<std::string> api_key;
    std::optional<std::string> model;
    std::optional<std::string> mock_script;
    std::optional<int> max_attempts;
    std::optional<double> backoff_base;
    std::optional<double> backoff_factor;
    std::optional<std::string> log_level;
};

/// Defaults, then environment variables (MIN_CHUNK_SIZE, MAX_CHUNK_SIZE,
/// MERGE_BY_KEYS, MAX_MERGED_SIZE, MIN_ORPHAN_SIZE, LLM_PROVIDER,
/// LLM_API_KEY, LLM_BASE_URL, LLM_MODEL, LOG_LEVEL, LLM_MOCK_SCRIPT), then
/// flags. Throws ConfigError.
PipelineConfig load_config(const EnvLookup& env, const ConfigOverrides& flags = {});

/// Transport for the configured provider: openai / openai_compatible speak
/// HTTP, mock runs in process. Throws ConfigError for unsupported providers.
std::shared_ptr<Transport> make_transport(const LlmSettings& settings);

/// Applies LOG_LEVEL (DEBUG, INFO, WARNING, ERROR, CRITICAL) to the default
/// logger, which writes to standard error.
void configure_logging(const std::string& level);

}  // namespace mdkeychunker
