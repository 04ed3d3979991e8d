#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/llm/prompts.hpp"

namespace forge::llm {

struct LlmRequest {
    std::string model_id;  // "<provider>:<model>", e.g. "mock:alpha"
    std::string prompt;
    std::optional<std::string> attachment_pdf;  // raw PDF bytes
    std::optional<TemplateId> template_id;
    int max_retries = 1;  // extra attempts after a refusal
    std::optional<double> temperature;
};

struct LlmResponse {
    std::string raw_text;
    bool refusal = false;
    nlohmann::json provider_meta = nlohmann::json::object();
    int attempts = 0;
};

// What a provider hands back for one attempt. Transport failures are thrown
// as TransportError instead.
struct ProviderReply {
    std::string text;
    bool policy_error = false;
    nlohmann::json meta = nlohmann::json::object();
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderReply send(const LlmRequest& request) = 0;
    // Whether the provider accepts a PDF attachment. Otherwise callers send
    // the extracted text.
    virtual bool supports_pdf(std::string_view model_id) const { return false; }
};

class RefusalDetector {
public:
    RefusalDetector();
    explicit RefusalDetector(std::vector<std::string> phrases);
    // Case-insensitive search for any phrase in the first 400 bytes.
    bool is_refusal(std::string_view text) const;
    const std::vector<std::string>& phrases() const noexcept { return phrases_; }

private:
    std::vector<std::string> phrases_;  // lowercase
};

// JSON-lines audit trail; one record per attempt. Thread-safe.
class AuditLog {
public:
    using Clock = std::function<std::string()>;
    AuditLog() = default;  // in-memory only
    explicit AuditLog(const std::filesystem::path& path, Clock clock = {});
    void record(nlohmann::json entry);
    std::vector<nlohmann::json> records() const;
    std::string now() const;
    void set_clock(Clock clock) { clock_ = std::move(clock); }

private:
    mutable std::mutex mutex_;
    std::optional<std::ofstream> out_;
    std::vector<nlohmann::json> records_;
    Clock clock_;
};

// Token bucket: `rate` tokens per second, up to `burst` stored. acquire()
// blocks until a token is available. A non-positive rate never blocks.
class RateLimiter {
public:
    explicit RateLimiter(double rate_per_second = 0.0, double burst = 1.0);
    void acquire();

private:
    std::mutex mutex_;
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct GatewayOptions {
    int transport_retries = 3;
    std::chrono::milliseconds backoff_base{500};
    RefusalDetector refusals;
    std::function<void(std::chrono::milliseconds)> sleep;  // injectable for tests
};

class Gateway {
public:
    explicit Gateway(GatewayOptions options = {}, std::shared_ptr<AuditLog> audit = std::make_shared<AuditLog>());

    // Routes every model id "<prefix>:..." to `provider`.
    void register_provider(const std::string& prefix, std::shared_ptr<Provider> provider, double rate_per_second = 0.0);

    // Tries up to 1 + max_retries times until a non-refusal answer; the last
    // refusal is returned if all attempts refuse. Each attempt retries
    // transport failures with exponential backoff up to transport_retries
    // times, then rethrows. Throws ConfigError for an unroutable model id and
    // ContractError for an empty prompt.
    LlmResponse complete(const LlmRequest& request);

    bool supports_pdf(const std::string& model_id) const;
    bool knows(const std::string& model_id) const;
    std::size_t call_count() const noexcept { return calls_.load(); }
    AuditLog& audit() { return *audit_; }

private:
    struct Route {
        std::shared_ptr<Provider> provider;
        std::shared_ptr<RateLimiter> limiter;
    };
    const Route& route(const std::string& model_id) const;
    ProviderReply send_with_retries(const Route& r, const LlmRequest& request, int attempt);

    GatewayOptions options_;
    std::shared_ptr<AuditLog> audit_;
    std::map<std::string, Route, std::less<>> routes_;
    std::atomic<std::size_t> calls_{0};
};

std::string_view provider_prefix(std::string_view model_id);
std::string_view provider_model(std::string_view model_id);

}  // namespace forge::llm
