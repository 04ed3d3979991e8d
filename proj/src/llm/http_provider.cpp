#include "forge/llm/http_provider.hpp"

#include <cctype>
#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>
#include <openssl/evp.h>

#include "forge/common/error.hpp"

namespace forge::llm {

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    const auto scheme = config_.base_url.find("://");
    if (scheme == std::string::npos) throw ConfigError(fmt::format("base URL without scheme: {}", config_.base_url));
    const auto path = config_.base_url.find('/', scheme + 3);
    origin_ = config_.base_url.substr(0, path);
    path_prefix_ = path == std::string::npos ? "" : config_.base_url.substr(path);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

ProviderReply HttpProvider::send(const LlmRequest& request) {
    nlohmann::json content;
    if (request.attachment_pdf && config_.supports_pdf) {
        content = nlohmann::json::array(
            {{{"type", "file"},
              {"file", {{"filename", "paper.pdf"}, {"file_data", "data:application/pdf;base64," + base64_encode(*request.attachment_pdf)}}}},
             {{"type", "text"}, {"text", request.prompt}}});
    } else {
        content = request.prompt;
    }
    nlohmann::json body = {{"model", std::string(provider_model(request.model_id))},
                           {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})}};
    if (request.temperature) body["temperature"] = *request.temperature;

    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(config_.timeout_seconds);
    client.set_write_timeout(120);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError(fmt::format("{}: {}", origin_, httplib::to_string(res.error())));

    nlohmann::json payload = nlohmann::json::parse(res->body, nullptr, false);
    if (res->status == 429 || res->status >= 500) {
        throw TransportError(fmt::format("{} returned HTTP {}", origin_, res->status));
    }
    if (res->status >= 400) {
        const std::string code = payload.is_object() && payload.contains("error") && payload["error"].is_object()
                                     ? payload["error"].value("code", payload["error"].value("type", ""))
                                     : "";
        if (code.find("content_policy") != std::string::npos || code.find("content_filter") != std::string::npos ||
            code.find("safety") != std::string::npos) {
            ProviderReply reply;
            reply.policy_error = true;
            reply.meta = {{"http_status", res->status}, {"error_code", code}};
            return reply;
        }
        throw ConfigError(fmt::format("{} rejected the request with HTTP {}: {}", origin_, res->status, res->body.substr(0, 300)));
    }
    if (payload.is_discarded() || !payload.contains("choices") || payload["choices"].empty()) {
        throw ParseError("chat completion response without choices", res->body);
    }
    const auto& choice = payload["choices"][0];
    const auto& message = choice.value("message", nlohmann::json::object());
    ProviderReply reply;
    if (message.contains("content") && message["content"].is_string()) reply.text = message["content"].get<std::string>();
    if (message.contains("refusal") && message["refusal"].is_string() && !message["refusal"].get<std::string>().empty()) {
        reply.policy_error = true;
        if (reply.text.empty()) reply.text = message["refusal"].get<std::string>();
    }
    if (choice.value("finish_reason", "") == "content_filter") reply.policy_error = true;
    reply.meta = {{"http_status", res->status}, {"finish_reason", choice.value("finish_reason", "")}};
    if (payload.contains("usage")) reply.meta["usage"] = payload["usage"];
    return reply;
}

const std::vector<KnownProvider>& known_providers() {
    static const std::vector<KnownProvider> providers{
        {"openai", "OPENAI_API_KEY", "https://api.openai.com/v1"},
        {"anthropic", "ANTHROPIC_API_KEY", "https://api.anthropic.com/v1"},
        {"google", "GEMINI_API_KEY", "https://generativelanguage.googleapis.com/v1beta/openai"},
        {"deepseek", "DEEPSEEK_API_KEY", "https://api.deepseek.com/v1"},
        {"xai", "XAI_API_KEY", "https://api.x.ai/v1"},
    };
    return providers;
}

std::shared_ptr<Provider> provider_from_env(const std::string& prefix) {
    std::string upper;
    for (char c : prefix) upper.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : '_');
    auto env = [](const std::string& name) -> std::string {
        const char* v = std::getenv(name.c_str());
        return v ? v : "";
    };
    HttpProviderConfig config;
    std::string key_env = "FORGE_" + upper + "_API_KEY";
    for (const auto& k : known_providers()) {
        if (k.prefix == prefix) {
            config.base_url = k.default_base_url;
            key_env = k.key_env;
        }
    }
    if (auto url = env("FORGE_" + upper + "_BASE_URL"); !url.empty()) config.base_url = url;
    if (config.base_url.empty()) {
        throw ConfigError(fmt::format("no provider '{}': set FORGE_{}_BASE_URL and FORGE_{}_API_KEY", prefix, upper, upper));
    }
    config.api_key = env(key_env);
    if (config.api_key.empty()) config.api_key = env("FORGE_" + upper + "_API_KEY");
    if (config.api_key.empty()) throw EnvironmentError(fmt::format("credential for provider '{}' missing: set {}", prefix, key_env));
    config.supports_pdf = env("FORGE_" + upper + "_PDF") == "1";
    return std::make_shared<HttpProvider>(std::move(config));
}

}  // namespace forge::llm
