#include "mdkeychunker/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mdkeychunker/mock_provider.hpp"
#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

constexpr std::array<std::string_view, 4> kProviders{"openai", "openai_compatible", "anthropic", "mock"};
constexpr std::array<std::string_view, 6> kLogLevels{"DEBUG", "INFO", "WARNING", "WARN", "ERROR", "CRITICAL"};

std::size_t parse_size(const std::string& variable, const std::string& raw) {
    auto value = text::trim(raw);
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(variable, "expected a non-negative integer, got '" + raw + "'");
    }
    return out;
}

bool parse_bool(const std::string& variable, const std::string& raw) {
    std::string v = text::to_lower_ascii(text::trim(raw));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(variable, "expected a boolean, got '" + raw + "'");
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

EnvLookup env_from_map(std::map<std::string, std::string> values) {
    return [values = std::move(values)](const std::string& name) -> std::optional<std::string> {
        auto it = values.find(name);
        if (it == values.end()) return std::nullopt;
        return it->second;
    };
}

PipelineConfig load_config(const EnvLookup& env, const ConfigOverrides& flags) {
    PipelineConfig cfg;

    if (auto v = env("MIN_CHUNK_SIZE")) cfg.min_chunk_size = parse_size("MIN_CHUNK_SIZE", *v);
    if (auto v = env("MAX_CHUNK_SIZE")) cfg.max_chunk_size = parse_size("MAX_CHUNK_SIZE", *v);
    if (auto v = env("MERGE_BY_KEYS")) cfg.merge_by_keys = parse_bool("MERGE_BY_KEYS", *v);
    if (auto v = env("MAX_MERGED_SIZE")) cfg.max_merged_size = parse_size("MAX_MERGED_SIZE", *v);
    if (auto v = env("MIN_ORPHAN_SIZE")) cfg.min_orphan_size = parse_size("MIN_ORPHAN_SIZE", *v);
    if (auto v = env("LLM_PROVIDER")) cfg.llm.provider = text::to_lower_ascii(text::trim(*v));
    if (auto v = env("LLM_API_KEY")) cfg.llm.api_key = *v;
    if (auto v = env("LLM_BASE_URL")) cfg.llm.base_url = *v;
    if (auto v = env("LLM_MODEL")) cfg.llm.model = *v;
    if (auto v = env("LLM_MOCK_SCRIPT")) cfg.llm.mock_script = *v;
    if (auto v = env("LOG_LEVEL")) cfg.log_level = upper(std::string(text::trim(*v)));

    if (flags.min_chunk_size) cfg.min_chunk_size = *flags.min_chunk_size;
    if (flags.max_chunk_size) cfg.max_chunk_size = *flags.max_chunk_size;
    if (flags.merge_by_keys) cfg.merge_by_keys = *flags.merge_by_keys;
    if (flags.max_merged_size) cfg.max_merged_size = *flags.max_merged_size;
    if (flags.min_orphan_size) cfg.min_orphan_size = *flags.min_orphan_size;
    if (flags.rolling_key_capacity) cfg.rolling_key_capacity = *flags.rolling_key_capacity;
    if (flags.rolling_keys_enabled) cfg.rolling_keys_enabled = *flags.rolling_keys_enabled;
    if (flags.provider) cfg.llm.provider = text::to_lower_ascii(*flags.provider);
    if (flags.base_url) cfg.llm.base_url = *flags.base_url;
    if (flags.api_key) cfg.llm.api_key = *flags.api_key;
    if (flags.model) cfg.llm.model = *flags.model;
    if (flags.mock_script) cfg.llm.mock_script = *flags.mock_script;
    if (flags.max_attempts) cfg.retry.max_attempts = *flags.max_attempts;
    if (flags.backoff_base) cfg.retry.base_delay_seconds = *flags.backoff_base;
    if (flags.backoff_factor) cfg.retry.factor = *flags.backoff_factor;
    if (flags.log_level) cfg.log_level = upper(*flags.log_level);

    if (cfg.min_chunk_size >= cfg.max_chunk_size) {
        throw ConfigError("MIN_CHUNK_SIZE", "must be smaller than MAX_CHUNK_SIZE (" +
                                                std::to_string(cfg.min_chunk_size) + " >= " +
                                                std::to_string(cfg.max_chunk_size) + ")");
    }
    if (cfg.max_chunk_size >= cfg.max_merged_size) {
        throw ConfigError("MAX_MERGED_SIZE", "must be larger than MAX_CHUNK_SIZE (" +
                                                 std::to_string(cfg.max_merged_size) + " <= " +
                                                 std::to_string(cfg.max_chunk_size) + ")");
    }
    if (cfg.min_orphan_size == 0) throw ConfigError("MIN_ORPHAN_SIZE", "must be positive");
    if (cfg.rolling_key_capacity == 0) throw ConfigError("rolling_key_capacity", "must be at least 1");
    if (cfg.retry.max_attempts < 1) throw ConfigError("max_attempts", "must be at least 1");
    if (cfg.retry.base_delay_seconds < 0 || cfg.retry.factor < 0) {
        throw ConfigError("backoff", "delays must be nonnegative");
    }
    if (std::find(kProviders.begin(), kProviders.end(), cfg.llm.provider) == kProviders.end()) {
        throw ConfigError("LLM_PROVIDER", "unknown provider '" + cfg.llm.provider + "'");
    }
    if (std::find(kLogLevels.begin(), kLogLevels.end(), cfg.log_level) == kLogLevels.end()) {
        throw ConfigError("LOG_LEVEL", "unknown level '" + cfg.log_level + "'");
    }
    cfg.validate();
    return cfg;
}

std::shared_ptr<Transport> make_transport(const LlmSettings& settings) {
    if (settings.provider == "mock") return load_mock_transport(settings.mock_script);
    if (settings.provider == "openai") {
        return std::make_shared<HttpTransport>(
            settings.base_url.empty() ? "https://api.openai.com/v1" : settings.base_url, settings.api_key);
    }
    if (settings.provider == "openai_compatible") {
        if (settings.base_url.empty()) throw ConfigError("LLM_BASE_URL", "required for openai_compatible");
        return std::make_shared<HttpTransport>(settings.base_url, settings.api_key);
    }
    throw ConfigError("LLM_PROVIDER", "provider '" + settings.provider + "' is not supported by this build");
}

void configure_logging(const std::string& level) {
    static const auto logger = [] {
        auto l = spdlog::stderr_color_mt("mdkeychunker");
        spdlog::set_default_logger(l);
        return l;
    }();
    const std::string lvl = upper(level);
    spdlog::level::level_enum e = spdlog::level::info;
    if (lvl == "DEBUG") e = spdlog::level::debug;
    if (lvl == "WARNING" || lvl == "WARN") e = spdlog::level::warn;
    if (lvl == "ERROR") e = spdlog::level::err;
    if (lvl == "CRITICAL") e = spdlog::level::critical;
    logger->set_level(e);
}

}  // namespace mdkeychunker
