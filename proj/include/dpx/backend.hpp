#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpx/corpus.hpp"
#include "dpx/params.hpp"

namespace dpx {

// What one extraction session asks for.
struct ExtractionRequest {
    std::string part_number;  // as supplied by the user (may be an alias)
    std::vector<std::string> requested_symbols;
    std::vector<Condition> conditions;

    // "<part> <symbols...> <name=value unit ...>": the q of the retrieval
    // recurrence.
    std::string query_text() const;
};

struct ChatRequest {
    std::string system_prompt;
    std::string user_prompt;
    int max_tokens = 1024;
    double temperature = 0.0;
};

struct CompletionResult {
    std::string text;
    double latency_ms = 0.0;
    std::string backend_id;
};

enum class MockMode { RuleBased, Canned };

struct MockScript {
    MockMode mode = MockMode::RuleBased;
    std::vector<std::string> canned;  // Canned mode; exhausted -> repeats last
    bool typ_preference = true;       // prefer the Typ column
    bool condition_matching = true;   // match Conditions cells against the request
    double inject_delay_ms = 0.0;     // latency floor for timing tests
};

class CompletionBackend {
  public:
    virtual ~CompletionBackend() = default;
    virtual CompletionResult complete(const ChatRequest& req) = 0;
    virtual std::string id() const = 0;
};

class MockBackend : public CompletionBackend {
  public:
    explicit MockBackend(MockScript script = {});
    CompletionResult complete(const ChatRequest& req) override;
    std::string id() const override { return "mock"; }
    int calls() const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct HttpBackendConfig {
    std::string base_url;  // e.g. http://localhost:8080
    std::string model;
    double temperature = 0.0;
    int max_tokens = 1024;
    int timeout_ms = 30000;
    int max_inflight = 4;
    std::string api_key_env = "DPX_API_KEY";
};

// OpenAI-compatible chat client: POST {base_url}/v1/chat/completions with
// model/messages/temperature/max_tokens; answer read from
// choices[0].message.content.
class HttpBackend : public CompletionBackend {
  public:
    explicit HttpBackend(HttpBackendConfig cfg);
    ~HttpBackend() override;
    CompletionResult complete(const ChatRequest& req) override;
    std::string id() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class PromptStage { Initial, Refine };

struct PromptBuild {
    ChatRequest request;
    int dropped_chunks = 0;  // lowest-scored chunks dropped to fit the budget
};

// Chunks must arrive sorted by descending retrieval score; when the prompt
// exceeds max_chars the lowest-scored chunks are dropped first.
PromptBuild build_extraction_prompt(const std::vector<Chunk>& chunks,
                                    const ExtractionRequest& req, PromptStage stage,
                                    int max_chars = 8000);

// Deterministic table-reading completion: the desk-scale stand-in for the
// generation model. Exposed for direct testing; MockBackend RuleBased mode
// routes here.
std::string mock_rule_complete(const ChatRequest& req, const MockScript& script = {});

// Answer block: a line "ANSWER:" followed by
//   <symbol> "=" <number>[".." <number>] [" " <unit>] [" @ " <conditions>]
// or <symbol>=? for unresolved symbols. Preceding reasoning text is ignored.
ParameterSet parse_extraction_output(const std::string& text);

std::string render_answer_block(const ParameterSet& params);

// Canonical datasheet row name for a symbol ("VTO" -> "Gate Threshold
// Voltage"); empty when unknown. The rule-based mock uses this the way a
// language model uses domain vocabulary: matching rows by their Parameter
// cell and hinting at synonyms for unresolved symbols.
std::string symbol_long_name(const std::string& symbol);

}  // namespace dpx
