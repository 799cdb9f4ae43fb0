#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpx/backend.hpp"
#include "dpx/devicegen.hpp"
#include "dpx/iro.hpp"
#include "dpx/po.hpp"
#include "dpx/tdr.hpp"

namespace dpx {

// Which of the three techniques run; ablation groups toggle these.
struct FeatureFlags {
    bool tdr = true;
    bool iro = true;
    bool po = true;
};

struct PipelineConfig {
    TdrConfig tdr;
    IroConfig iro;
    PriorityTable priorities = PriorityTable::defaults();
    int chunk_max_chars = 300;
};

struct PipelineOutcome {
    ResolveOutcome resolve;  // NotFound/recommendations short-circuit extraction
    DeviceClass device;
    ExtractionResult extraction;
    double elapsed_ms = 0.0;
    bool ran_extraction = false;
};

// One end-to-end extraction: resolve the part (when TDR is on), classify the
// device, build the prioritized stream, run the retrieval loop, then fill in
// derivable parameters (Ohm's-law RS). With TDR off, retrieval scans the
// whole corpus; with IRO off, the loop is capped at one iteration.
PipelineOutcome run_extraction(const std::string& part, const std::vector<std::string>& symbols,
                               const std::vector<Condition>& conditions,
                               const FeatureFlags& flags, const CorpusIndex& index,
                               CompletionBackend& backend, const PipelineConfig& cfg,
                               IroState* session = nullptr);

// Symbols that must be co-requested so derived parameters have their inputs
// (RS needs the V_F row and its I_F test condition).
std::vector<std::string> augment_requested_symbols(const std::vector<std::string>& symbols);

// Add derivable entries to an extracted set; currently RS via Ohm's law when
// RS was requested but only V_F@I_F was found.
void add_derived_parameters(ParameterSet& params, const std::vector<std::string>& requested);

}  // namespace dpx
