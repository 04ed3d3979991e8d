#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

#include "forge/llm/gateway.hpp"

namespace forge::llm {

// Scripted provider for offline runs. Script (JSON):
//   {
//     "supports_pdf": false,
//     "by_prompt_sha256": { "<hex>": <response or [responses]> },
//     "rules": [ { "model": "mock:a", "template": "judge", "contains": "..",
//                  "responses": <response or [responses]> } ],
//     "sequence": [ <response>, ... ],
//     "default": <response>
//   }
// A response is a string (the answer text) or an object with "text" and
// optionally "refusal": true, "policy_error": true or "transport_error": true.
// Lookup order: prompt hash, first matching rule (every given field must
// match; "contains" may be a list, all must occur), next unused sequence
// entry, default. A list answers its n-th call with its n-th entry and
// repeats the last one. Unscripted requests throw LookupError.
class MockProvider final : public Provider {
public:
    explicit MockProvider(nlohmann::json script);
    static MockProvider from_file(const std::filesystem::path& path);

    ProviderReply send(const LlmRequest& request) override;
    bool supports_pdf(std::string_view) const override { return supports_pdf_; }

private:
    ProviderReply pick(const nlohmann::json& responses, const std::string& counter_key);

    nlohmann::json script_;
    bool supports_pdf_ = false;
    std::mutex mutex_;
    std::map<std::string, std::size_t> counters_;
    std::size_t sequence_next_ = 0;
};

}  // namespace forge::llm
