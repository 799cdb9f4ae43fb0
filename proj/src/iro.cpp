#include "dpx/iro.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

namespace {

struct QueryTerms {
    std::set<std::string> lower;
    std::set<std::string> symbols;
};

QueryTerms query_terms(const std::string& query_text) {
    QueryTerms t;
    for (auto& tok : text::lower_tokens(query_text)) t.lower.insert(std::move(tok));
    for (auto& tok : text::symbol_tokens(query_text)) t.symbols.insert(std::move(tok));
    return t;
}

double score_against(const QueryTerms& terms, const Chunk& chunk, const CorpusIndex& index) {
    std::map<std::string, int> tf_lower;
    for (auto& tok : text::lower_tokens(chunk.text)) tf_lower[tok] += 1;
    std::map<std::string, int> tf_symbol;
    for (auto& tok : text::symbol_tokens(chunk.text)) tf_symbol[tok] += 1;

    double score = 0.0;
    for (const auto& t : terms.lower) {
        auto it = tf_lower.find(t);
        if (it == tf_lower.end()) continue;
        score += index.idf(t) * it->second;
    }
    for (const auto& s : terms.symbols) {
        auto it = tf_symbol.find(s);
        if (it == tf_symbol.end()) continue;
        score += 2.0 * index.symbol_idf(s) * it->second;
    }
    return score;
}

}  // namespace

double score_chunk(const std::string& query_text, const Chunk& chunk, const CorpusIndex& index) {
    return score_against(query_terms(query_text), chunk, index);
}

RetrievalResult retrieve(const std::string& y_prev, const std::string& q,
                         const ChunkStream& stream, int k, const CorpusIndex& index) {
    if (stream.total_chunks() == 0) throw EmptyCorpus("retrieval over an empty chunk stream");
    std::string concatenated = y_prev.empty() ? q : y_prev + " " + q;
    QueryTerms terms = query_terms(concatenated);

    RetrievalResult out;
    for (const auto& tier : stream.tiers) {
        struct Scored {
            double score;
            size_t position;
            const Chunk* chunk;
        };
        std::vector<Scored> positives;
        for (size_t i = 0; i < tier.chunks.size(); ++i) {
            double s = score_against(terms, tier.chunks[i], index);
            ++out.scanned;
            if (s > 0.0) positives.push_back({s, i, &tier.chunks[i]});
        }
        if (positives.empty()) continue;  // escalate to the next tier
        std::stable_sort(positives.begin(), positives.end(), [](const Scored& a, const Scored& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.position < b.position;
        });
        for (const auto& s : positives) {
            if (static_cast<int>(out.chunks.size()) >= k) break;
            out.chunks.push_back(*s.chunk);
        }
        return out;
    }

    // Nothing scored positive anywhere: hand the generator the leading
    // chunks so it can still report unresolved symbols in context.
    for (const auto& tier : stream.tiers) {
        for (const auto& c : tier.chunks) {
            if (static_cast<int>(out.chunks.size()) >= k) return out;
            out.chunks.push_back(c);
        }
    }
    return out;
}

void iro_step(IroState& state, const ExtractionRequest& req, CompletionBackend& backend,
              const ChunkStream& stream, const IroConfig& cfg, const CorpusIndex& index) {
    const int t_next = state.t + 1;
    const std::string q = req.query_text();
    std::string concatenated = state.y_prev.empty() ? q : state.y_prev + " " + q;

    RetrievalResult retrieval = retrieve(state.y_prev, q, stream, cfg.top_k, index);
    state.chunks_scanned += retrieval.scanned;

    IterationRecord record;
    record.t = t_next;
    record.query = concatenated;
    for (const auto& c : retrieval.chunks) record.chunk_ids.push_back(c.id());

    PromptBuild prompt =
        build_extraction_prompt(retrieval.chunks, req,
                                t_next == 1 ? PromptStage::Initial : PromptStage::Refine,
                                cfg.max_prompt_chars);
    if (prompt.dropped_chunks > 0) {
        record.note = text::format("dropped %d low-scoring chunk(s) to fit the prompt budget",
                                   prompt.dropped_chunks);
    }

    CompletionResult completion;
    int attempts = 1 + std::max(0, cfg.backend_retries);
    for (int attempt = 1;; ++attempt) {
        try {
            completion = backend.complete(prompt.request);
            break;
        } catch (const BackendError& e) {
            if (attempt >= attempts) {
                state.trace.push_back(std::move(record));
                throw BackendError(text::format("iteration %d: %s (after %d attempt(s))", t_next,
                                                e.what(), attempt));
            }
        }
    }

    record.raw_output = completion.text;
    try {
        ParameterSet parsed = parse_extraction_output(completion.text);
        for (const auto& [key, entry] : parsed.entries) state.accumulated.merge(entry);
        record.parse_ok = true;
    } catch (const ParseError&) {
        record.parse_ok = false;  // raw output kept in the trace, params unchanged
    }

    state.retrieved = std::move(retrieval.chunks);
    state.y_prev = completion.text;
    state.t = t_next;
    state.trace.push_back(std::move(record));
}

bool request_satisfied(const ParameterSet& params, const ExtractionRequest& req) {
    std::string cond_key = conditions_key(req.conditions);
    for (const auto& sym : req.requested_symbols) {
        if (req.conditions.empty()) {
            if (!params.has_symbol(sym)) return false;
        } else {
            if (!params.find(sym, cond_key)) return false;
        }
    }
    return true;
}

namespace {

bool any_range_answer(const ParameterSet& params, const ExtractionRequest& req) {
    for (const auto& sym : req.requested_symbols) {
        for (const auto& [key, entry] : params.entries) {
            if (entry.symbol == sym && entry.value.is_range) return true;
        }
    }
    return false;
}

}  // namespace

ExtractionResult run_iro(const ExtractionRequest& req, const ChunkStream& stream,
                         CompletionBackend& backend, const IroConfig& cfg,
                         const CorpusIndex& index, IroState* session) {
    IroState local;
    IroState& state = session ? *session : local;

    bool converged = false;
    while (state.t < cfg.max_iterations) {
        std::string previous_output = state.y_prev;
        iro_step(state, req, backend, stream, cfg, index);

        bool resolved = request_satisfied(state.accumulated, req);
        bool fixed_point = state.t >= 2 && state.y_prev == previous_output;
        switch (cfg.convergence) {
            case Convergence::FixedPoint: converged = fixed_point; break;
            case Convergence::AllParamsResolved: converged = resolved; break;
            case Convergence::Either: converged = fixed_point || resolved; break;
        }
        if (converged) break;
    }

    ExtractionResult result;
    result.parameters = state.accumulated;
    result.iterations_used = state.t;
    result.converged = converged;
    result.trace = state.trace;
    result.chunks_scanned = state.chunks_scanned;
    if (req.conditions.empty() && any_range_answer(state.accumulated, req)) {
        result.needs_user_input =
            "Ranges were reported for " + req.part_number +
            ". Provide operating conditions as key=value pairs (e.g. I_C=0.1mA, V_CE=10V) "
            "to narrow them.";
    }
    return result;
}

ExtractionResult run_iro(const ExtractionRequest& req, const DatasheetDoc& doc,
                         const SearchPlan& plan, CompletionBackend& backend, const IroConfig& cfg,
                         const CorpusIndex& index, bool po_enabled, int max_chars) {
    ChunkStream stream = prioritized_chunks(plan, doc, po_enabled, max_chars);
    return run_iro(req, stream, backend, cfg, index, nullptr);
}

}  // namespace dpx
