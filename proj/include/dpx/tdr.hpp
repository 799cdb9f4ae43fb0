#pragma once

#include <string>
#include <vector>

#include "dpx/corpus.hpp"

namespace dpx {

struct TdrConfig {
    int max_distance = 2;
    int max_recommendations = 5;
};

struct ModelQuery {
    std::string raw_input;
    std::string normalized;

    static ModelQuery from(const std::string& raw);
};

enum class MatchSource { Exact, Series, Fuzzy };

struct MatchCandidate {
    std::string doc_id;
    std::string matched_alias;
    int edit_distance = 0;
    double similarity = 1.0;  // 1 - distance / max(len)
    MatchSource source = MatchSource::Exact;

    bool operator==(const MatchCandidate&) const = default;
};

enum class ResolveKind { Exact, SeriesExpansion, Recommendations, NotFound };

struct ResolveOutcome {
    ResolveKind kind = ResolveKind::NotFound;
    std::string doc_id;                     // Exact only
    std::vector<MatchCandidate> candidates; // SeriesExpansion / Recommendations
};

// Minimum single-character insertions/deletions/substitutions turning a
// into b.
int levenshtein(std::string_view a, std::string_view b);

double similarity_score(std::string_view a, std::string_view b, int distance);

// Stable sort by (descending similarity, ascending matched_alias).
std::vector<MatchCandidate> rank_candidates(std::vector<MatchCandidate> cands);

// Resolution stages, in order: exact alias hit, series expansion (explicit
// tag or prefix of length >= 5), Levenshtein recommendations within
// cfg.max_distance, else NotFound.
ResolveOutcome resolve_model(const ModelQuery& query, const CorpusIndex& index,
                             const TdrConfig& cfg = {});

}  // namespace dpx
