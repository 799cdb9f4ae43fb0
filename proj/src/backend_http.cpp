#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>

#include "dpx/backend.hpp"
#include "dpx/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace dpx {

namespace {

using Clock = std::chrono::steady_clock;

// Bounded in-flight request count shared by concurrent sessions.
class InflightGate {
  public:
    explicit InflightGate(int limit) : limit_(limit > 0 ? limit : 1) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --active_;
        }
        cv_.notify_one();
    }

  private:
    int limit_;
    int active_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

}  // namespace

struct HttpBackend::Impl {
    HttpBackendConfig cfg;
    InflightGate gate;

    explicit Impl(HttpBackendConfig c) : cfg(std::move(c)), gate(cfg.max_inflight) {}
};

HttpBackend::HttpBackend(HttpBackendConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::id() const {
    return "http:" + impl_->cfg.model;
}

CompletionResult HttpBackend::complete(const ChatRequest& req) {
    const auto& cfg = impl_->cfg;
    impl_->gate.acquire();
    struct Release {
        InflightGate& g;
        ~Release() { g.release(); }
    } releaser{impl_->gate};

    httplib::Client client(cfg.base_url);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
    client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    nlohmann::json body = {
        {"model", cfg.model},
        {"messages",
         {{{"role", "system"}, {"content", req.system_prompt}},
          {{"role", "user"}, {"content", req.user_prompt}}}},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };

    auto t0 = Clock::now();
    auto result = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    double latency = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    if (!result) {
        auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            throw Timeout("request to " + cfg.base_url + " timed out");
        }
        throw TransportError("request to " + cfg.base_url + " failed: " +
                             httplib::to_string(err));
    }
    if (result->status == 429) {
        double retry_after = 0.0;
        if (result->has_header("Retry-After")) {
            retry_after = std::atof(result->get_header_value("Retry-After").c_str());
        }
        throw RateLimited("rate limited by " + cfg.base_url, retry_after);
    }
    if (result->status < 200 || result->status >= 300) {
        throw TransportError("HTTP " + std::to_string(result->status) + " from " + cfg.base_url);
    }

    try {
        auto json = nlohmann::json::parse(result->body);
        std::string content = json.at("choices").at(0).at("message").at("content");
        return CompletionResult{std::move(content), latency, id()};
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed completion response: ") + e.what());
    }
}

}  // namespace dpx
