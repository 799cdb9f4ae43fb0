#include "dpx/tdr.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "dpx/text.hpp"

namespace dpx {

ModelQuery ModelQuery::from(const std::string& raw) {
    return ModelQuery{raw, text::normalize_part(raw)};
}

int levenshtein(std::string_view a, std::string_view b) {
    const size_t m = a.size(), n = b.size();
    if (m == 0) return static_cast<int>(n);
    if (n == 0) return static_cast<int>(m);
    std::vector<int> prev(n + 1), cur(n + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (size_t i = 1; i <= m; ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= n; ++j) {
            int subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

double similarity_score(std::string_view a, std::string_view b, int distance) {
    size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(distance) / static_cast<double>(longest);
}

std::vector<MatchCandidate> rank_candidates(std::vector<MatchCandidate> cands) {
    std::stable_sort(cands.begin(), cands.end(),
                     [](const MatchCandidate& x, const MatchCandidate& y) {
                         if (x.similarity != y.similarity) return x.similarity > y.similarity;
                         return x.matched_alias < y.matched_alias;
                     });
    return cands;
}

namespace {

ResolveOutcome series_outcome(const std::string& query, const std::vector<std::string>& doc_ids,
                              const CorpusIndex& index, std::string_view series_key) {
    ResolveOutcome out;
    out.kind = ResolveKind::SeriesExpansion;
    for (const auto& doc_id : doc_ids) {
        const DatasheetDoc* doc = index.find(doc_id);
        if (!doc) continue;
        MatchCandidate c;
        c.doc_id = doc_id;
        c.matched_alias = doc->meta.part_number;
        // The match is against the series key, not the member part number.
        c.edit_distance = levenshtein(query, series_key);
        c.similarity = similarity_score(query, series_key, c.edit_distance);
        c.source = MatchSource::Series;
        out.candidates.push_back(std::move(c));
    }
    out.candidates = rank_candidates(std::move(out.candidates));
    return out;
}

}  // namespace

ResolveOutcome resolve_model(const ModelQuery& query, const CorpusIndex& index,
                             const TdrConfig& cfg) {
    const std::string& q = query.normalized;

    // (1) exact alias lookup
    if (auto it = index.alias_map.find(q); it != index.alias_map.end()) {
        ResolveOutcome out;
        out.kind = ResolveKind::Exact;
        out.doc_id = it->second;
        return out;
    }

    // (2) series expansion: explicit tag first, then prefix fallback.
    if (auto it = index.series_map.find(q); it != index.series_map.end()) {
        return series_outcome(q, it->second, index, q);
    }
    if (q.size() >= 5) {
        std::vector<std::string> prefixed;
        for (const auto& [doc_id, doc] : index.documents) {
            if (doc.meta.part_number.size() > q.size() &&
                doc.meta.part_number.compare(0, q.size(), q) == 0) {
                prefixed.push_back(doc_id);
            }
        }
        if (!prefixed.empty()) return series_outcome(q, prefixed, index, q);
    }

    // (3) fuzzy recommendations over all aliases, best alias per document.
    std::map<std::string, MatchCandidate> best_per_doc;
    for (const auto& [alias, doc_id] : index.alias_map) {
        int d = levenshtein(q, alias);
        if (d > cfg.max_distance) continue;
        MatchCandidate c;
        c.doc_id = doc_id;
        c.matched_alias = alias;
        c.edit_distance = d;
        c.similarity = similarity_score(q, alias, d);
        c.source = MatchSource::Fuzzy;
        auto it = best_per_doc.find(doc_id);
        if (it == best_per_doc.end() || c.similarity > it->second.similarity ||
            (c.similarity == it->second.similarity && c.matched_alias < it->second.matched_alias)) {
            best_per_doc[doc_id] = std::move(c);
        }
    }
    if (!best_per_doc.empty()) {
        ResolveOutcome out;
        out.kind = ResolveKind::Recommendations;
        for (auto& [doc_id, cand] : best_per_doc) out.candidates.push_back(std::move(cand));
        out.candidates = rank_candidates(std::move(out.candidates));
        if (static_cast<int>(out.candidates.size()) > cfg.max_recommendations) {
            out.candidates.resize(cfg.max_recommendations);
        }
        return out;
    }

    return ResolveOutcome{};  // NotFound
}

}  // namespace dpx
