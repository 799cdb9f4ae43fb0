#include "dpx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

GroupConfig GroupConfig::for_group(int id) {
    switch (id) {
        case 1: return {1, false, false, false};
        case 2: return {2, true, true, false};
        case 3: return {3, true, false, true};
        case 4: return {4, false, true, true};
        case 5: return {5, true, true, true};
        default: throw Error("ablation groups are numbered 1..5, got " + std::to_string(id));
    }
}

std::string GroupConfig::label() const {
    switch (group_id) {
        case 1: return "Group 1 (Baseline): No innovation applied";
        case 2: return "Group 2: TDR + IRO (without PO)";
        case 3: return "Group 3: TDR + PO (without IRO)";
        case 4: return "Group 4: IRO + PO (without TDR)";
        case 5: return "Group 5: TDR + IRO + PO";
        default: return "Group " + std::to_string(group_id);
    }
}

GroupStats GroupStats::from_samples(const std::vector<double>& samples) {
    GroupStats s;
    s.n = static_cast<int>(samples.size());
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / s.n;
    if (s.n >= 2) {
        double sq = 0.0;
        for (double v : samples) sq += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(sq / (s.n - 1));
    }
    return s;
}

double precision(int correct, int extracted) {
    if (extracted == 0) throw NoExtractions("precision undefined for zero extractions");
    return 100.0 * static_cast<double>(correct) / static_cast<double>(extracted);
}

double avg_response_time(const std::vector<double>& times_ms) {
    if (times_ms.empty()) throw EmptyList("average response time over an empty list");
    double sum = 0.0;
    for (double t : times_ms) sum += t;
    return sum / static_cast<double>(times_ms.size());
}

double pooled_sd(double sx, double sy, int nx, int ny) {
    if (nx < 2 || ny < 2) throw InsufficientSamples("pooled SD needs at least 2 samples per group");
    double num = (nx - 1) * sx * sx + (ny - 1) * sy * sy;
    return std::sqrt(num / static_cast<double>(nx + ny - 2));
}

double cohens_d(const GroupStats& x, const GroupStats& y) {
    if (x.mean == y.mean && x.sd == y.sd && x.n == y.n) return 0.0;
    double sp = pooled_sd(x.sd, y.sd, x.n, y.n);
    if (sp == 0.0) {
        if (x.mean == y.mean) return 0.0;
        throw ZeroPooledSD("identical constant groups with different means: infinite effect");
    }
    return (x.mean - y.mean) / sp;
}

double round2(double v) {
    return std::floor(v * 100.0 + 0.5) / 100.0;
}

Improvement improvement_columns(double precision_pct, double latency_ms,
                                double baseline_precision, double baseline_latency) {
    if (baseline_precision <= 0.0 || baseline_latency <= 0.0) {
        throw ZeroBaseline("baseline precision and latency must be positive");
    }
    Improvement imp;
    imp.precision_improvement =
        round2((precision_pct - baseline_precision) / baseline_precision * 100.0);
    imp.latency_reduction = round2((baseline_latency - latency_ms) / baseline_latency * 100.0);
    return imp;
}

bool match_parameter(const ParamEntry& extracted, const TruthValue& truth, double rel_tol) {
    if (extracted.unit != truth.unit) return false;
    if (extracted.value.is_range != truth.value.is_range) return false;
    auto close = [&](double got, double want) {
        return std::abs(got - want) <= rel_tol * std::abs(want);
    };
    if (!close(extracted.value.lo, truth.value.lo)) return false;
    if (extracted.value.is_range && !close(extracted.value.hi, truth.value.hi)) return false;
    return true;
}

std::string GroundTruth::key(const std::string& doc_id, const std::string& symbol,
                             const std::string& cond_key) {
    return doc_id + "|" + symbol + "|" + cond_key;
}

const TruthValue* GroundTruth::find(const std::string& doc_id, const std::string& symbol,
                                    const std::string& cond_key) const {
    auto it = entries.find(key(doc_id, symbol, cond_key));
    return it == entries.end() ? nullptr : &it->second;
}

const ParamEntry* final_answer(const ParameterSet& params, const std::string& symbol,
                               const std::vector<Condition>& conditions) {
    if (!conditions.empty()) {
        if (const ParamEntry* e = params.find(symbol, conditions_key(conditions))) return e;
    }
    const ParamEntry* general = params.find(symbol, "");
    const ParamEntry* first = nullptr;
    int count = 0;
    for (const auto& [key, e] : params.entries) {
        if (e.symbol != symbol) continue;
        if (!first) first = &e;
        ++count;
    }
    if (count == 1) return first;
    if (general) return general;
    return first;  // deterministic map order; nullptr when the symbol is absent
}

std::pair<int, int> score_extraction(const ParameterSet& params, const EvalQuery& query,
                                     const GroundTruth& truth, double rel_tol) {
    int correct = 0, extracted = 0;
    for (const auto& sym : query.symbols) {
        const ParamEntry* answer = final_answer(params, sym, query.conditions);
        if (!answer) continue;  // no extraction for this symbol
        ++extracted;
        auto expected_it = query.expected_cond_key.find(sym);
        std::string expected_key =
            expected_it == query.expected_cond_key.end() ? "" : expected_it->second;
        const TruthValue* want = truth.find(query.doc_id, sym, expected_key);
        if (!want) continue;
        // The answer must sit at the truth's condition key and match its value.
        if (conditions_key(answer->conditions) != expected_key) continue;
        if (match_parameter(*answer, *want, rel_tol)) ++correct;
    }
    return {correct, extracted};
}

namespace {

struct GroupAccumulator {
    long total_correct = 0;
    long total_extracted = 0;
    std::vector<double> latencies;           // one sample per request
    std::vector<double> query_precisions;    // per query with E > 0
    std::map<std::string, long> scan_counts; // per query
    std::map<std::string, double> precisions;
    long queries = 0;
    long max_scans = 0;
};

}  // namespace

EvalReport run_ablation(const CorpusIndex& index, const GroundTruth& truth,
                        const std::vector<EvalQuery>& queries,
                        const std::vector<GroupConfig>& groups, CompletionBackend& backend,
                        int trials, uint64_t seed, const PipelineConfig& cfg) {
    EvalReport report;
    report.seed = seed;
    report.trials = trials;

    std::map<int, GroupAccumulator> acc;
    for (const auto& group : groups) {
        auto& a = acc[group.group_id];
        for (const auto& query : queries) {
            a.queries += 1;
            int c_first = 0, e_first = 0;
            for (int trial = 0; trial < trials; ++trial) {
                PipelineOutcome outcome;
                try {
                    outcome = run_extraction(query.part, query.symbols, query.conditions,
                                             group.flags(), index, backend, cfg);
                } catch (const BackendError& e) {
                    throw BackendError(text::format("group %d query %s: %s", group.group_id,
                                                    query.id.c_str(), e.what()));
                }
                auto [c, e] = score_extraction(outcome.extraction.parameters, query, truth);
                a.total_correct += c;
                a.total_extracted += e;
                a.latencies.push_back(outcome.elapsed_ms);
                if (trial == 0) {
                    c_first = c;
                    e_first = e;
                    a.scan_counts[query.id] = outcome.extraction.chunks_scanned;
                    a.max_scans = std::max(a.max_scans, outcome.extraction.chunks_scanned);
                }
            }
            if (e_first > 0) {
                double p = precision(c_first, e_first);
                a.query_precisions.push_back(p);
                a.precisions[query.id] = p;
            }
        }
    }

    // Rows in the order the caller listed the groups; improvements against
    // group 1 when present, else the first listed group.
    int baseline_id = groups.front().group_id;
    for (const auto& g : groups) {
        if (g.group_id == 1) baseline_id = 1;
    }
    const GroupAccumulator& base = acc.at(baseline_id);
    double base_precision =
        base.total_extracted > 0
            ? precision(static_cast<int>(base.total_correct), static_cast<int>(base.total_extracted))
            : 0.0;
    double base_latency = avg_response_time(base.latencies);

    for (const auto& group : groups) {
        const auto& a = acc.at(group.group_id);
        EvalRow row;
        row.group_id = group.group_id;
        row.label = group.label();
        row.total_correct = a.total_correct;
        row.total_extracted = a.total_extracted;
        row.queries = a.queries;
        row.max_chunks_scanned = a.max_scans;
        row.precision_pct =
            a.total_extracted > 0
                ? precision(static_cast<int>(a.total_correct), static_cast<int>(a.total_extracted))
                : 0.0;
        row.latency_ms = avg_response_time(a.latencies);
        if (base_precision > 0.0 && base_latency > 0.0) {
            Improvement imp =
                improvement_columns(row.precision_pct, row.latency_ms, base_precision, base_latency);
            row.precision_improvement = imp.precision_improvement;
            row.latency_reduction = imp.latency_reduction;
        }
        report.rows.push_back(row);
        report.scan_counts[group.group_id] = a.scan_counts;
        report.query_precision[group.group_id] = a.precisions;
    }

    // Table-II style comparisons, present only when both sides ran.
    struct Comparison {
        int x, y;
        const char* method;
    };
    const Comparison comparisons[] = {{5, 2, "PO"}, {5, 3, "IRO"}, {5, 4, "TDR"}, {5, 1, "ALL"}};
    bool effect_sizes_possible = trials >= 2;
    if (!effect_sizes_possible) {
        report.notes.push_back(
            "effect sizes omitted: fewer than 2 trials, latency SDs undefined (n < 2)");
    }
    for (const auto& cmp : comparisons) {
        if (!acc.count(cmp.x) || !acc.count(cmp.y)) continue;
        const auto& gx = acc.at(cmp.x);
        const auto& gy = acc.at(cmp.y);
        if (!effect_sizes_possible) continue;
        GroupStats px = GroupStats::from_samples(gx.query_precisions);
        GroupStats py = GroupStats::from_samples(gy.query_precisions);
        GroupStats lx = GroupStats::from_samples(gx.latencies);
        GroupStats ly = GroupStats::from_samples(gy.latencies);
        EffectSizeRow row;
        row.comparison = text::format("Group %d vs Group %d", cmp.x, cmp.y);
        row.tested_method = cmp.method;
        if (px.n >= 2 && py.n >= 2) {
            try {
                row.d_precision = cohens_d(px, py);  // improved group first
            } catch (const ZeroPooledSD&) {
                row.d_precision = std::numeric_limits<double>::infinity();
            }
        }
        try {
            row.d_latency = cohens_d(ly, lx);  // slower group first
        } catch (const ZeroPooledSD&) {
            row.d_latency = std::numeric_limits<double>::infinity();
        }
        report.effect_sizes.push_back(row);
    }

    report.notes.push_back(
        "precision aggregated over summed (C, E) per group; latency is the mean over every "
        "request, measured sequentially");
    report.notes.push_back(
        "Cohen's d convention: precision compares improved group vs the other; latency compares "
        "the slower group vs the faster, so positive d means improvement in both columns");
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["Experiment Configuration"] = r.label;
        row["Retrieval Precision (%)"] = round2(r.precision_pct);
        row["Retrieval Latency (ms)"] = round2(r.latency_ms);
        row["Precision Improvement (%)"] = r.precision_improvement;
        row["Latency Reduction (%)"] = r.latency_reduction;
        row["precision_full"] = r.precision_pct;
        row["latency_full_ms"] = r.latency_ms;
        row["correct"] = r.total_correct;
        row["extracted"] = r.total_extracted;
        row["queries"] = r.queries;
        j["rows"].push_back(row);
    }
    j["effect_sizes"] = nlohmann::json::array();
    for (const auto& e : effect_sizes) {
        nlohmann::json row;
        row["Group Comparison"] = e.comparison;
        row["Tested Method"] = e.tested_method;
        auto put = [&](const char* key, double v) {
            if (std::isinf(v)) {
                row[key] = "inf";
            } else {
                row[key] = v;
            }
        };
        put("Cohen's d (Precision Improvement)", e.d_precision);
        put("Cohen's d (Latency Reduction)", e.d_latency);
        j["effect_sizes"].push_back(row);
    }
    j["notes"] = notes;
    return j.dump(2);
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << text::format("%-46s  %14s  %13s  %12s  %11s\n", "Experiment Configuration",
                        "Precision (%)", "Latency (ms)", "Prec Impr(%)", "Lat Red(%)");
    for (const auto& r : rows) {
        out << text::format("%-46s  %14.2f  %13.2f  %12.2f  %11.2f\n", r.label.c_str(),
                            r.precision_pct, r.latency_ms, r.precision_improvement,
                            r.latency_reduction);
    }
    if (!effect_sizes.empty()) {
        out << "\n";
        out << text::format("%-22s  %-8s  %22s  %22s\n", "Group Comparison", "Method",
                            "Cohen's d (Precision)", "Cohen's d (Latency)");
        for (const auto& e : effect_sizes) {
            out << text::format("%-22s  %-8s  %22.2f  %22.2f\n", e.comparison.c_str(),
                                e.tested_method.c_str(), e.d_precision, e.d_latency);
        }
    }
    for (const auto& n : notes) out << "note: " << n << "\n";
    return out.str();
}

}  // namespace dpx
