#pragma once

#include <string>

#include "forge/llm/gateway.hpp"

namespace forge::llm {

struct HttpProviderConfig {
    std::string base_url;  // e.g. "https://api.openai.com/v1"
    std::string api_key;
    bool supports_pdf = false;
    int timeout_seconds = 600;
};

// OpenAI-compatible chat-completions client. HTTP 429, 5xx and connection
// failures are TransportError; a content-policy rejection or a "refusal"
// message field is a policy error; other 4xx are ConfigError.
class HttpProvider final : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    ProviderReply send(const LlmRequest& request) override;
    bool supports_pdf(std::string_view) const override { return config_.supports_pdf; }

private:
    HttpProviderConfig config_;
    std::string origin_;  // scheme://host[:port]
    std::string path_prefix_;
};

struct KnownProvider {
    std::string prefix;
    std::string key_env;
    std::string default_base_url;
};

const std::vector<KnownProvider>& known_providers();

// Provider for `prefix` from the environment: <KEY_ENV> for the credential,
// FORGE_<PREFIX>_BASE_URL to override the endpoint. Unknown prefixes need
// both FORGE_<PREFIX>_BASE_URL and FORGE_<PREFIX>_API_KEY. Throws
// EnvironmentError when the credential is missing, ConfigError when the
// prefix is unknown and has no base URL.
std::shared_ptr<Provider> provider_from_env(const std::string& prefix);

std::string base64_encode(std::string_view bytes);

}  // namespace forge::llm
