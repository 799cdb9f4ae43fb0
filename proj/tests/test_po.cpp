#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "dpx/iro.hpp"
#include "dpx/po.hpp"
#include "dpx/synth.hpp"

using namespace dpx;

namespace {

CorpusIndex fixture_index() {
    static CorpusIndex index = [] {
        SynthCorpus corpus = gen_synthetic_corpus({});
        return corpus.build_index();
    }();
    return index;
}

}  // namespace

TEST_CASE("heading labels match canonical phrases case-insensitively") {
    CHECK(label_for_heading("Electrical Characteristics (TA = 25degC)").kind ==
          SectionKind::ElectricalCharacteristics);
    CHECK(label_for_heading("ABSOLUTE MAXIMUM RATINGS").kind ==
          SectionKind::AbsoluteMaximumRatings);
    CHECK(label_for_heading("Typical Performance Curves").kind ==
          SectionKind::TypicalPerformanceCurves);
    CHECK(label_for_heading("thermal characteristics").kind ==
          SectionKind::ThermalCharacteristics);
    SectionLabel other = label_for_heading("Ordering Information");
    CHECK(other.kind == SectionKind::Other);
    CHECK(other.other_heading == "Ordering Information");
}

TEST_CASE("labeling is total, deterministic, idempotent") {
    CorpusIndex index = fixture_index();
    for (const auto& [doc_id, doc] : index.documents) {
        DatasheetDoc once = label_sections(doc);
        DatasheetDoc twice = label_sections(once);
        CHECK(once == twice);
        for (const auto& sec : once.sections) {
            if (sec.label.kind == SectionKind::Other) CHECK(sec.label.other_heading == sec.heading);
        }
    }
}

TEST_CASE("default priority table puts electrical characteristics uniquely first") {
    PriorityTable table = PriorityTable::defaults();
    int ec_tier = table.tiers.at(SectionKind::ElectricalCharacteristics);
    CHECK(ec_tier == 1);
    for (const auto& [kind, tier] : table.tiers) {
        if (kind != SectionKind::ElectricalCharacteristics) CHECK(tier > ec_tier);
    }
}

TEST_CASE("search plan groups sections by ascending tier, document order within") {
    CorpusIndex index = fixture_index();
    DatasheetDoc doc = label_sections(*index.find("p2n2222a"));
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    REQUIRE(!plan.tiers.empty());
    CHECK(plan.tiers.front().tier == 1);
    // EC section leads the plan
    CHECK(doc.sections[plan.tiers.front().section_ordinals.front()].label.kind ==
          SectionKind::ElectricalCharacteristics);
    int covered = 0;
    for (size_t i = 0; i < plan.tiers.size(); ++i) {
        if (i > 0) CHECK(plan.tiers[i].tier > plan.tiers[i - 1].tier);
        CHECK(std::is_sorted(plan.tiers[i].section_ordinals.begin(),
                             plan.tiers[i].section_ordinals.end()));
        covered += static_cast<int>(plan.tiers[i].section_ordinals.size());
    }
    CHECK(covered == static_cast<int>(doc.sections.size()));
}

TEST_CASE("only Other sections collapse to one tier") {
    DatasheetDoc doc;
    doc.doc_id = "d";
    doc.meta.part_number = "D1";
    for (int i = 0; i < 3; ++i) {
        Section s;
        s.heading = "Chapter " + std::to_string(i);
        s.ordinal = i;
        s.body_text = "text";
        doc.sections.push_back(s);
    }
    doc = label_sections(doc);
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    REQUIRE(plan.tiers.size() == 1);
    CHECK(plan.tiers[0].section_ordinals == std::vector<int>{0, 1, 2});
}

TEST_CASE("two electrical sections share tier one in document order") {
    DatasheetDoc doc;
    doc.doc_id = "d";
    doc.meta.part_number = "D1";
    const char* headings[] = {"Overview", "Electrical Characteristics",
                              "Electrical Characteristics (pulsed)"};
    for (int i = 0; i < 3; ++i) {
        Section s;
        s.heading = headings[i];
        s.ordinal = i;
        s.body_text = "text";
        doc.sections.push_back(s);
    }
    doc = label_sections(doc);
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    CHECK(plan.tiers.front().tier == 1);
    CHECK(plan.tiers.front().section_ordinals == std::vector<int>{1, 2});
}

TEST_CASE("disabled preference keeps plain document order in a single tier") {
    CorpusIndex index = fixture_index();
    DatasheetDoc doc = label_sections(*index.find("p2n2222a"));
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    ChunkStream stream = prioritized_chunks(plan, doc, false, 300);
    REQUIRE(stream.tiers.size() == 1);
    auto expected = chunk_document(doc, 300);
    CHECK(stream.tiers[0].chunks == expected);
}

TEST_CASE("enabled preference emits tier blocks covering every chunk exactly once") {
    CorpusIndex index = fixture_index();
    for (const auto& [doc_id, raw] : index.documents) {
        DatasheetDoc doc = label_sections(raw);
        SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
        ChunkStream stream = prioritized_chunks(plan, doc, true, 300);
        for (size_t i = 1; i < stream.tiers.size(); ++i) {
            CHECK(stream.tiers[i].tier > stream.tiers[i - 1].tier);
        }
        // multiset equality against the raw chunking
        auto expected = chunk_document(doc, 300);
        auto flattened = stream.flattened();
        REQUIRE(flattened.size() == expected.size());
        std::map<std::string, int> counts;
        for (const auto& c : flattened) counts[c.id()] += 1;
        for (const auto& c : expected) counts[c.id()] -= 1;
        for (const auto& [id, n] : counts) CHECK(n == 0);
        // within a tier, chunks keep document order
        for (const auto& tier : stream.tiers) {
            for (size_t i = 1; i < tier.chunks.size(); ++i) {
                CHECK(tier.chunks[i].chunk_index > tier.chunks[i - 1].chunk_index);
            }
        }
    }
}

TEST_CASE("higher-tier chunks precede lower-tier ones") {
    DatasheetDoc doc;
    doc.doc_id = "d";
    doc.meta.part_number = "D1";
    Section a;
    a.heading = "Typical Performance Curves";  // tier 3
    a.ordinal = 0;
    a.body_text = "curve summary text";
    Section b;
    b.heading = "Electrical Characteristics";  // tier 1
    b.ordinal = 1;
    b.body_text = "characteristics text";
    doc.sections = {a, b};
    doc = label_sections(doc);
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    ChunkStream stream = prioritized_chunks(plan, doc, true, 300);
    REQUIRE(stream.tiers.size() == 2);
    CHECK(stream.tiers[0].chunks.front().section_ordinal == 1);
    CHECK(stream.tiers[1].chunks.front().section_ordinal == 0);
}

TEST_CASE("retrieval escalates past tiers that score zero") {
    CorpusIndex index = fixture_index();
    DatasheetDoc doc = label_sections(*index.find("p2n2222a"));
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    ChunkStream stream = prioritized_chunks(plan, doc, true, 300);
    // vocabulary that only the package section uses
    RetrievalResult r = retrieve("", "soldering guidance", stream, 4, index);
    REQUIRE(!r.chunks.empty());
    CHECK(r.chunks.front().text.find("soldering") != std::string::npos);
    // every tier before the answer's was scanned on the way down
    CHECK(r.scanned > static_cast<long>(stream.tiers.front().chunks.size()));
}

TEST_CASE("2n7002e: the gate-threshold chunk sits in tier one") {
    CorpusIndex index = fixture_index();
    DatasheetDoc doc = label_sections(*index.find("2n7002e"));
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    ChunkStream stream = prioritized_chunks(plan, doc, true, 300);
    REQUIRE(stream.tiers.front().tier == 1);
    bool found = false;
    for (const auto& c : stream.tiers.front().chunks) {
        if (c.text.find("| VTO |") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("preference reduces chunks scanned for tier-one answers") {
    CorpusIndex index = fixture_index();
    DatasheetDoc doc = label_sections(*index.find("2n7002e"));
    SearchPlan plan = build_search_plan(doc, PriorityTable::defaults());
    ChunkStream with_po = prioritized_chunks(plan, doc, true, 300);
    ChunkStream without = prioritized_chunks(plan, doc, false, 300);
    std::string q = "2N7002E VTO gate threshold";
    RetrievalResult r1 = retrieve("", q, with_po, 4, index);
    RetrievalResult r2 = retrieve("", q, without, 4, index);
    CHECK(r1.scanned <= r2.scanned);
    // both find the VTO row, the prioritized stream after scanning only tier 1
    CHECK(r1.chunks.front().text.find("| VTO |") != std::string::npos);
    CHECK(r1.scanned == static_cast<long>(with_po.tiers.front().chunks.size()));
}
