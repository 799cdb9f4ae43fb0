#include "dpx/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace dpx {

std::vector<std::string> augment_requested_symbols(const std::vector<std::string>& symbols) {
    std::vector<std::string> out = symbols;
    if (std::find(out.begin(), out.end(), "RS") != out.end() &&
        std::find(out.begin(), out.end(), "V_F") == out.end()) {
        out.push_back("V_F");
    }
    return out;
}

void add_derived_parameters(ParameterSet& params, const std::vector<std::string>& requested) {
    bool wants_rs = std::find(requested.begin(), requested.end(), "RS") != requested.end();
    if (!wants_rs || params.has_symbol("RS")) return;
    for (const auto& [key, entry] : params.entries) {
        if (entry.symbol != "V_F" || entry.value.is_range) continue;
        for (const auto& cond : entry.conditions) {
            if (cond.name != "I_F" || cond.value == 0.0) continue;
            ParamEntry rs = derive_rs_ohms_law(units::Quantity{entry.value.lo, entry.unit},
                                               units::Quantity{cond.value, cond.unit});
            params.merge(rs);
            return;
        }
    }
}

PipelineOutcome run_extraction(const std::string& part, const std::vector<std::string>& symbols,
                               const std::vector<Condition>& conditions,
                               const FeatureFlags& flags, const CorpusIndex& index,
                               CompletionBackend& backend, const PipelineConfig& cfg,
                               IroState* session) {
    auto t0 = std::chrono::steady_clock::now();
    PipelineOutcome out;

    ExtractionRequest req;
    req.part_number = part;
    req.requested_symbols = augment_requested_symbols(symbols);
    req.conditions = conditions;

    ChunkStream stream;
    if (flags.tdr) {
        out.resolve = resolve_model(ModelQuery::from(part), index, cfg.tdr);
        if (out.resolve.kind != ResolveKind::Exact) {
            out.elapsed_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            return out;  // caller handles recommendations / series / not-found
        }
        const DatasheetDoc* doc = index.find(out.resolve.doc_id);
        DatasheetDoc labeled = label_sections(*doc);
        out.device = classify_device(labeled);
        req.part_number = labeled.meta.part_number;  // canonical form for the prompt
        SearchPlan plan = build_search_plan(labeled, cfg.priorities);
        stream = prioritized_chunks(plan, labeled, flags.po, cfg.chunk_max_chars);
    } else {
        // Whole-corpus retrieval; classification still works when the part
        // happens to resolve, since it only gates interactive prompting.
        if (const DatasheetDoc* doc = index.find_by_part(part)) {
            out.device = classify_device(*doc);
        }
        stream = corpus_stream(index, cfg.priorities, flags.po, cfg.chunk_max_chars);
    }

    IroConfig iro_cfg = cfg.iro;
    if (!flags.iro) iro_cfg.max_iterations = 1;

    out.extraction = run_iro(req, stream, backend, iro_cfg, index, session);
    add_derived_parameters(out.extraction.parameters, symbols);
    out.ran_extraction = true;
    out.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace dpx
