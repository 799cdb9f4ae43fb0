#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpx/backend.hpp"
#include "dpx/corpus.hpp"
#include "dpx/po.hpp"

namespace dpx {

enum class Convergence { FixedPoint, AllParamsResolved, Either };

struct IroConfig {
    int max_iterations = 3;  // T
    int top_k = 4;           // retrieval set size
    Convergence convergence = Convergence::Either;
    int max_prompt_chars = 8000;
    int backend_retries = 1;  // extra attempts per backend call
};

struct IterationRecord {
    int t = 0;
    std::string query;  // y_{t-1} ∥ q
    std::vector<std::string> chunk_ids;
    std::string raw_output;
    bool parse_ok = false;
    std::string note;
};

struct IroState {
    int t = 0;
    std::string y_prev;            // previous generation output (empty at t=0)
    std::vector<Chunk> retrieved;  // last retrieval set
    ParameterSet accumulated;
    std::vector<IterationRecord> trace;
    long chunks_scanned = 0;  // chunks scored across all iterations
};

struct ExtractionResult {
    ParameterSet parameters;
    int iterations_used = 0;
    bool converged = false;
    std::optional<std::string> needs_user_input;
    std::vector<IterationRecord> trace;
    long chunks_scanned = 0;
};

// tf-idf over the shared token statistics; case-exact symbol hits count
// triple (1x from the lowercase term plus 2x from the symbol index).
double score_chunk(const std::string& query_text, const Chunk& chunk, const CorpusIndex& index);

struct RetrievalResult {
    std::vector<Chunk> chunks;  // descending score, ties in stream order
    long scanned = 0;           // chunks scored before stopping
};

// Score y_prev ∥ q against the stream tier by tier, stopping at the first
// tier that yields any positively scored chunk; returns that tier's top k.
// When no chunk scores positive anywhere, falls back to the first k chunks
// of the stream so the generation stage still sees document context.
RetrievalResult retrieve(const std::string& y_prev, const std::string& q,
                         const ChunkStream& stream, int k, const CorpusIndex& index);

// One turn of the recurrence: retrieve, prompt, generate, parse, merge.
void iro_step(IroState& state, const ExtractionRequest& req, CompletionBackend& backend,
              const ChunkStream& stream, const IroConfig& cfg, const CorpusIndex& index);

// Loop iro_step until convergence or T iterations. A partially run state may
// be passed to resume a session (the interactive condition-refinement flow);
// the iteration budget T covers the whole session.
ExtractionResult run_iro(const ExtractionRequest& req, const ChunkStream& stream,
                         CompletionBackend& backend, const IroConfig& cfg,
                         const CorpusIndex& index, IroState* session = nullptr);

ExtractionResult run_iro(const ExtractionRequest& req, const DatasheetDoc& doc,
                         const SearchPlan& plan, CompletionBackend& backend, const IroConfig& cfg,
                         const CorpusIndex& index, bool po_enabled = true, int max_chars = 300);

// A request is satisfied when every requested symbol is resolved; requests
// carrying conditions need a condition-specific entry, not just a general
// range.
bool request_satisfied(const ParameterSet& params, const ExtractionRequest& req);

}  // namespace dpx
