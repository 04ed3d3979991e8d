#include "forge/llm/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/hash.hpp"
#include "forge/common/time.hpp"

namespace forge::llm {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string_view provider_prefix(std::string_view model_id) {
    const auto colon = model_id.find(':');
    return colon == std::string_view::npos ? std::string_view{} : model_id.substr(0, colon);
}

std::string_view provider_model(std::string_view model_id) {
    const auto colon = model_id.find(':');
    return colon == std::string_view::npos ? model_id : model_id.substr(colon + 1);
}

RefusalDetector::RefusalDetector()
    : RefusalDetector({"i can't help", "i cannot help", "i can't assist", "cannot assist", "i'm sorry, but i can",
                       "i am sorry, but i can", "i won't be able to", "i'm not able to help", "i must decline",
                       "i can't comply", "cannot comply with"}) {}

RefusalDetector::RefusalDetector(std::vector<std::string> phrases) {
    for (auto& p : phrases) phrases_.push_back(lower(p));
}

bool RefusalDetector::is_refusal(std::string_view text) const {
    std::string head = lower(text.substr(0, 400));
    for (auto pos = head.find("\xE2\x80\x99"); pos != std::string::npos; pos = head.find("\xE2\x80\x99", pos)) {
        head.replace(pos, 3, "'");
    }
    for (const auto& p : phrases_)
        if (head.find(p) != std::string::npos) return true;
    return false;
}

AuditLog::AuditLog(const std::filesystem::path& path, Clock clock) : clock_(std::move(clock)) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.emplace(path, std::ios::app);
    if (!*out_) throw EnvironmentError(fmt::format("cannot open audit log {}", path.string()));
}

std::string AuditLog::now() const { return clock_ ? clock_() : utc_timestamp(); }

void AuditLog::record(nlohmann::json entry) {
    if (!entry.contains("timestamp")) entry["timestamp"] = now();
    std::lock_guard lock(mutex_);
    if (out_) {
        *out_ << entry.dump() << '\n';
        out_->flush();
    }
    records_.push_back(std::move(entry));
}

std::vector<nlohmann::json> AuditLog::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

RateLimiter::RateLimiter(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    if (rate_ <= 0.0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = std::chrono::steady_clock::now();
        tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        // Holding the lock while sleeping serializes waiters in arrival order.
        std::this_thread::sleep_for(wait);
    }
}

Gateway::Gateway(GatewayOptions options, std::shared_ptr<AuditLog> audit)
    : options_(std::move(options)), audit_(std::move(audit)) {
    if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!audit_) audit_ = std::make_shared<AuditLog>();
}

void Gateway::register_provider(const std::string& prefix, std::shared_ptr<Provider> provider, double rate_per_second) {
    routes_[prefix] = Route{std::move(provider), std::make_shared<RateLimiter>(rate_per_second)};
}

const Gateway::Route& Gateway::route(const std::string& model_id) const {
    const auto prefix = provider_prefix(model_id);
    auto it = routes_.find(prefix);
    if (prefix.empty() || it == routes_.end() || provider_model(model_id).empty()) {
        throw ConfigError(fmt::format("unknown model id '{}' (expected <provider>:<model> with a configured provider)", model_id));
    }
    return it->second;
}

bool Gateway::knows(const std::string& model_id) const {
    const auto prefix = provider_prefix(model_id);
    return !prefix.empty() && routes_.find(prefix) != routes_.end();
}

bool Gateway::supports_pdf(const std::string& model_id) const { return route(model_id).provider->supports_pdf(model_id); }

ProviderReply Gateway::send_with_retries(const Route& r, const LlmRequest& request, int attempt) {
    for (int transport_try = 0;; ++transport_try) {
        r.limiter->acquire();
        ++calls_;
        try {
            return r.provider->send(request);
        } catch (const TransportError& e) {
            audit_->record({{"template_id", request.template_id ? std::string(to_string(*request.template_id)) : ""},
                            {"model_id", request.model_id},
                            {"prompt_sha256", sha256_hex(request.prompt)},
                            {"response_sha256", nullptr},
                            {"refusal", false},
                            {"attempt", attempt},
                            {"transport_error", e.what()}});
            if (transport_try >= options_.transport_retries) throw;
            const auto delay = options_.backoff_base * (1 << transport_try);
            spdlog::warn("{}: transport error ({}), retrying in {} ms", request.model_id, e.what(), delay.count());
            options_.sleep(delay);
        }
    }
}

LlmResponse Gateway::complete(const LlmRequest& request) {
    const Route& r = route(request.model_id);
    if (request.prompt.empty()) throw ContractError("LLM request with empty prompt");
    const std::string prompt_hash = sha256_hex(request.prompt);
    const std::string template_name = request.template_id ? std::string(to_string(*request.template_id)) : "";

    LlmResponse response;
    const int attempts = 1 + std::max(0, request.max_retries);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        ProviderReply reply = send_with_retries(r, request, attempt);
        response.raw_text = std::move(reply.text);
        response.refusal = reply.policy_error || options_.refusals.is_refusal(response.raw_text);
        response.provider_meta = std::move(reply.meta);
        response.attempts = attempt;
        audit_->record({{"template_id", template_name},
                        {"model_id", request.model_id},
                        {"prompt_sha256", prompt_hash},
                        {"response_sha256", sha256_hex(response.raw_text)},
                        {"refusal", response.refusal},
                        {"attempt", attempt}});
        if (!response.refusal) return response;
        spdlog::debug("{} refused {} (attempt {}/{})", request.model_id, template_name, attempt, attempts);
    }
    return response;
}

}  // namespace forge::llm
