#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpx/corpus.hpp"

namespace dpx {

// Priority tier per section category; 1 is highest. Electrical
// Characteristics holds the unique top tier in the default table.
struct PriorityTable {
    std::map<SectionKind, int> tiers;

    static PriorityTable defaults();
    int tier_of(const SectionLabel& label) const;
};

struct SearchPlan {
    struct TierGroup {
        int tier = 0;
        std::vector<int> section_ordinals;  // document order within the tier
        bool escalation = true;             // consumer may stop once satisfied
    };
    std::vector<TierGroup> tiers;  // ascending tier order
};

// Ordered chunk stream with explicit tier boundaries so the retrieval loop
// can stop after a satisfying tier.
struct ChunkStream {
    struct TierBlock {
        int tier = 0;
        std::vector<Chunk> chunks;
    };
    std::vector<TierBlock> tiers;

    size_t total_chunks() const;
    std::vector<Chunk> flattened() const;
};

SectionLabel label_for_heading(const std::string& heading);

// Assign labels to every section by case-insensitive substring match of the
// canonical phrases; unmatched headings become Other(heading).
DatasheetDoc label_sections(DatasheetDoc doc);

SearchPlan build_search_plan(const DatasheetDoc& doc, const PriorityTable& priorities);

// Emit chunks tier by tier (po_enabled) or in plain document order as a
// single tier (disabled).
ChunkStream prioritized_chunks(const SearchPlan& plan, const DatasheetDoc& doc, bool po_enabled,
                               int max_chars);

// Corpus-wide stream: tier t holds every document's tier-t chunks, documents
// in doc_id order. Used when targeted document retrieval is disabled.
ChunkStream corpus_stream(const CorpusIndex& index, const PriorityTable& priorities,
                          bool po_enabled, int max_chars);

}  // namespace dpx
