#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpx/backend.hpp"
#include "dpx/params.hpp"
#include "dpx/pipeline.hpp"

namespace dpx {

// Ablation group feature assignment, matching the five-configuration
// protocol: G1 none, G2 TDR+IRO, G3 TDR+PO, G4 IRO+PO, G5 all.
struct GroupConfig {
    int group_id = 1;
    bool tdr_enabled = false;
    bool iro_enabled = false;
    bool po_enabled = false;

    static GroupConfig for_group(int id);
    FeatureFlags flags() const { return FeatureFlags{tdr_enabled, iro_enabled, po_enabled}; }
    std::string label() const;
};

struct RunRecord {
    std::string query_id;
    int group_id = 0;
    ParameterSet extracted;
    int correct_count = 0;    // C
    int extracted_count = 0;  // E
    double response_ms = 0.0; // T_i
    long chunks_scanned = 0;
};

struct GroupStats {
    double mean = 0.0;
    double sd = 0.0;  // sample SD, n-1 denominator
    int n = 0;

    static GroupStats from_samples(const std::vector<double>& samples);
};

// --- metric formulas ---

// C/E * 100; E = 0 is undefined and raises NoExtractions.
double precision(int correct, int extracted);

double avg_response_time(const std::vector<double>& times_ms);

// sqrt(((nx-1)sx^2 + (ny-1)sy^2) / (nx+ny-2)); needs nx,ny >= 2.
double pooled_sd(double sx, double sy, int nx, int ny);

// (mean_x - mean_y) / pooled_sd. Identical groups give 0; distinct constant
// groups raise ZeroPooledSD.
double cohens_d(const GroupStats& x, const GroupStats& y);

// Rounded half-up to 2 decimals.
double round2(double v);

struct Improvement {
    double precision_improvement = 0.0;  // (p - p0)/p0 * 100, rounded
    double latency_reduction = 0.0;      // (l0 - l)/l0 * 100, rounded
};
Improvement improvement_columns(double precision_pct, double latency_ms, double baseline_precision,
                                double baseline_latency);

// "Correctly extracted": same symbol, same normalized condition key, value
// within rel_tol of the truth (both endpoints for ranges). Units must already
// be SI-normalized, which parse_extraction_output guarantees.
struct TruthValue {
    ParamValue value;
    std::string unit;
};
bool match_parameter(const ParamEntry& extracted, const TruthValue& truth, double rel_tol = 0.01);

// --- ground truth and queries ---

struct GroundTruth {
    // doc_id|symbol|cond_key -> truth
    std::map<std::string, TruthValue> entries;

    static std::string key(const std::string& doc_id, const std::string& symbol,
                           const std::string& cond_key);
    const TruthValue* find(const std::string& doc_id, const std::string& symbol,
                           const std::string& cond_key) const;
};

struct EvalQuery {
    std::string id;
    std::string part;    // what the user types (canonical or alias)
    std::string doc_id;  // ground-truth document
    std::vector<std::string> symbols;
    std::vector<Condition> conditions;
    // Per symbol: the condition key under which the truth is recorded.
    std::map<std::string, std::string> expected_cond_key;
    std::string category;  // generator annotation, reporting only
};

// The answer entry a user would take for one requested symbol: the entry at
// the requested conditions when present, otherwise the symbol's single entry,
// otherwise its general entry, otherwise the first in deterministic order.
const ParamEntry* final_answer(const ParameterSet& params, const std::string& symbol,
                               const std::vector<Condition>& conditions);

struct EvalRow {
    int group_id = 0;
    std::string label;
    double precision_pct = 0.0;  // full precision, not rounded
    double latency_ms = 0.0;
    double precision_improvement = 0.0;
    double latency_reduction = 0.0;
    long total_correct = 0;
    long total_extracted = 0;
    long queries = 0;
    long max_chunks_scanned = 0;
};

struct EffectSizeRow {
    std::string comparison;     // "Group 5 vs Group 2"
    std::string tested_method;  // PO / IRO / TDR / ALL
    double d_precision = 0.0;
    double d_latency = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<EffectSizeRow> effect_sizes;
    std::vector<std::string> notes;
    uint64_t seed = 0;
    int trials = 0;

    // Per (group, query): chunk-scan counters and per-query precision, kept
    // for property checks on group-flag semantics.
    std::map<int, std::map<std::string, long>> scan_counts;
    std::map<int, std::map<std::string, double>> query_precision;

    std::string to_json() const;   // Table-I column names plus effect_sizes
    std::string to_table() const;  // aligned text table
};

EvalReport run_ablation(const CorpusIndex& index, const GroundTruth& truth,
                        const std::vector<EvalQuery>& queries,
                        const std::vector<GroupConfig>& groups, CompletionBackend& backend,
                        int trials, uint64_t seed, const PipelineConfig& cfg = {});

// Score one extraction against a query's expected truth: returns (C, E).
std::pair<int, int> score_extraction(const ParameterSet& params, const EvalQuery& query,
                                     const GroundTruth& truth, double rel_tol = 0.01);

}  // namespace dpx
