#include "dpx/po.hpp"

#include <algorithm>
#include <array>

#include "dpx/text.hpp"

namespace dpx {

namespace {

struct Phrase {
    const char* needle;
    SectionKind kind;
};

// Checked in order; first match wins.
constexpr std::array<Phrase, 5> kPhrases = {{
    {"electrical characteristics", SectionKind::ElectricalCharacteristics},
    {"absolute maximum ratings", SectionKind::AbsoluteMaximumRatings},
    {"typical performance curves", SectionKind::TypicalPerformanceCurves},
    {"thermal characteristics", SectionKind::ThermalCharacteristics},
    {"package information", SectionKind::PackageInformation},
}};

}  // namespace

PriorityTable PriorityTable::defaults() {
    PriorityTable t;
    t.tiers = {
        {SectionKind::ElectricalCharacteristics, 1},
        {SectionKind::AbsoluteMaximumRatings, 2},
        {SectionKind::TypicalPerformanceCurves, 3},
        {SectionKind::ThermalCharacteristics, 3},
        {SectionKind::PackageInformation, 4},
        {SectionKind::Other, 5},
    };
    return t;
}

int PriorityTable::tier_of(const SectionLabel& label) const {
    auto it = tiers.find(label.kind);
    if (it != tiers.end()) return it->second;
    auto other = tiers.find(SectionKind::Other);
    return other != tiers.end() ? other->second : 5;
}

SectionLabel label_for_heading(const std::string& heading) {
    for (const auto& p : kPhrases) {
        if (text::icontains(heading, p.needle)) return SectionLabel{p.kind, ""};
    }
    return SectionLabel{SectionKind::Other, heading};
}

DatasheetDoc label_sections(DatasheetDoc doc) {
    for (auto& sec : doc.sections) sec.label = label_for_heading(sec.heading);
    return doc;
}

SearchPlan build_search_plan(const DatasheetDoc& doc, const PriorityTable& priorities) {
    std::map<int, std::vector<int>> by_tier;
    for (const auto& sec : doc.sections) {
        by_tier[priorities.tier_of(sec.label)].push_back(sec.ordinal);
    }
    SearchPlan plan;
    for (auto& [tier, ordinals] : by_tier) {
        plan.tiers.push_back(SearchPlan::TierGroup{tier, std::move(ordinals), true});
    }
    return plan;
}

size_t ChunkStream::total_chunks() const {
    size_t n = 0;
    for (const auto& t : tiers) n += t.chunks.size();
    return n;
}

std::vector<Chunk> ChunkStream::flattened() const {
    std::vector<Chunk> out;
    out.reserve(total_chunks());
    for (const auto& t : tiers) out.insert(out.end(), t.chunks.begin(), t.chunks.end());
    return out;
}

ChunkStream prioritized_chunks(const SearchPlan& plan, const DatasheetDoc& doc, bool po_enabled,
                               int max_chars) {
    std::vector<Chunk> all = chunk_document(doc, max_chars);
    ChunkStream stream;
    if (!po_enabled) {
        stream.tiers.push_back({1, std::move(all)});
        return stream;
    }
    for (const auto& group : plan.tiers) {
        ChunkStream::TierBlock block;
        block.tier = group.tier;
        for (int ordinal : group.section_ordinals) {
            for (const auto& c : all) {
                if (c.section_ordinal == ordinal) block.chunks.push_back(c);
            }
        }
        if (!block.chunks.empty()) stream.tiers.push_back(std::move(block));
    }
    return stream;
}

ChunkStream corpus_stream(const CorpusIndex& index, const PriorityTable& priorities,
                          bool po_enabled, int max_chars) {
    ChunkStream stream;
    if (!po_enabled) {
        ChunkStream::TierBlock block;
        block.tier = 1;
        for (const auto& [doc_id, doc] : index.documents) {
            auto chunks = chunk_document(doc, max_chars);
            block.chunks.insert(block.chunks.end(), chunks.begin(), chunks.end());
        }
        stream.tiers.push_back(std::move(block));
        return stream;
    }
    std::map<int, ChunkStream::TierBlock> blocks;
    for (const auto& [doc_id, doc] : index.documents) {
        DatasheetDoc labeled = label_sections(doc);
        SearchPlan plan = build_search_plan(labeled, priorities);
        ChunkStream per_doc = prioritized_chunks(plan, labeled, true, max_chars);
        for (auto& tier_block : per_doc.tiers) {
            auto& dst = blocks[tier_block.tier];
            dst.tier = tier_block.tier;
            dst.chunks.insert(dst.chunks.end(), tier_block.chunks.begin(),
                              tier_block.chunks.end());
        }
    }
    for (auto& [tier, block] : blocks) stream.tiers.push_back(std::move(block));
    return stream;
}

}  // namespace dpx
