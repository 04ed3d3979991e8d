#include "forge/llm/mock.hpp"

#include <fmt/format.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/hash.hpp"

namespace forge::llm {

namespace {

bool rule_matches(const nlohmann::json& rule, const LlmRequest& request) {
    if (rule.contains("model") && rule["model"].get<std::string>() != request.model_id) return false;
    if (rule.contains("template")) {
        if (!request.template_id || rule["template"].get<std::string>() != to_string(*request.template_id)) return false;
    }
    if (rule.contains("contains")) {
        const auto& c = rule["contains"];
        if (c.is_string()) return request.prompt.find(c.get<std::string>()) != std::string::npos;
        for (const auto& item : c)
            if (request.prompt.find(item.get<std::string>()) == std::string::npos) return false;
    }
    return true;
}

ProviderReply to_reply(const nlohmann::json& r) {
    ProviderReply reply;
    reply.meta = {{"provider", "mock"}};
    if (r.is_string()) {
        reply.text = r.get<std::string>();
        return reply;
    }
    if (!r.is_object()) throw ConfigError(fmt::format("mock response must be a string or object: {}", r.dump()));
    if (r.value("transport_error", false)) throw TransportError("mock transport error");
    reply.text = r.value("text", "");
    if (r.value("policy_error", false)) reply.policy_error = true;
    if (r.value("refusal", false) && reply.text.empty()) reply.text = "I can't help with that request.";
    if (r.value("refusal", false)) reply.meta["scripted_refusal"] = true;
    return reply;
}

}  // namespace

MockProvider::MockProvider(nlohmann::json script) : script_(std::move(script)) {
    if (!script_.is_object()) throw ConfigError("mock script must be a JSON object");
    supports_pdf_ = script_.value("supports_pdf", false);
}

MockProvider MockProvider::from_file(const std::filesystem::path& path) {
    try {
        return MockProvider(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("mock script {}: {}", path.string(), e.what()));
    }
}

ProviderReply MockProvider::pick(const nlohmann::json& responses, const std::string& counter_key) {
    if (!responses.is_array()) return to_reply(responses);
    if (responses.empty()) throw ConfigError("mock response list is empty");
    std::size_t n;
    {
        std::lock_guard lock(mutex_);
        n = counters_[counter_key]++;
    }
    return to_reply(responses[std::min(n, responses.size() - 1)]);
}

ProviderReply MockProvider::send(const LlmRequest& request) {
    const std::string hash = sha256_hex(request.prompt);
    if (auto it = script_.find("by_prompt_sha256"); it != script_.end() && it->contains(hash)) {
        return pick((*it)[hash], "hash:" + hash);
    }
    if (auto it = script_.find("rules"); it != script_.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& rule = (*it)[i];
            if (!rule_matches(rule, request)) continue;
            const auto& responses = rule.contains("responses") ? rule["responses"] : rule.at("response");
            // Lists advance per (rule, prompt) so concurrent callers with
            // different prompts do not consume each other's entries.
            return pick(responses, fmt::format("rule:{}:{}", i, hash));
        }
    }
    if (auto it = script_.find("sequence"); it != script_.end() && it->is_array()) {
        std::size_t n;
        {
            std::lock_guard lock(mutex_);
            n = sequence_next_;
            if (n < it->size()) ++sequence_next_;
        }
        if (n < it->size()) return to_reply((*it)[n]);
    }
    if (auto it = script_.find("default"); it != script_.end() && !it->is_null()) return to_reply(*it);
    throw LookupError(fmt::format("mock: no scripted response for {} ({}) prompt {}", request.model_id,
                                  request.template_id ? to_string(*request.template_id) : "no template",
                                  hash.substr(0, 12)));
}

}  // namespace forge::llm
