#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dpx {

// Section category assigned by the preference-optimization labeler.
enum class SectionKind {
    ElectricalCharacteristics,
    AbsoluteMaximumRatings,
    TypicalPerformanceCurves,
    ThermalCharacteristics,
    PackageInformation,
    Other,
};

struct SectionLabel {
    SectionKind kind = SectionKind::Other;
    std::string other_heading;  // set when kind == Other

    bool operator==(const SectionLabel&) const = default;
};

std::string to_string(SectionKind kind);

struct DocMeta {
    std::string part_number;  // canonical, uppercase
    std::string series;       // prefix family or explicit tag
    std::string manufacturer;
    std::vector<std::string> device_keywords;
    std::vector<std::string> aliases;  // includes the part number itself

    bool operator==(const DocMeta&) const = default;
};

struct ParamTable {
    std::vector<std::string> columns;             // ordered header names
    std::vector<std::vector<std::string>> rows;   // each row has |columns| cells

    // Case-insensitive column lookup; -1 when absent.
    int column_index(std::string_view name) const;

    bool operator==(const ParamTable&) const = default;
};

struct Section {
    std::string heading;
    SectionLabel label;
    std::string body_text;
    std::vector<ParamTable> tables;
    int ordinal = 0;  // index within document

    bool operator==(const Section&) const = default;
};

struct DatasheetDoc {
    DocMeta meta;
    std::vector<Section> sections;
    std::string doc_id;

    bool operator==(const DatasheetDoc&) const = default;
};

// One retrieval unit: either a slice of section prose or a table slice
// (full header plus a contiguous run of rows).
struct TableSlice {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    int first_row = 0;  // index of rows.front() in the source table
    int table_index = 0;

    bool operator==(const TableSlice&) const = default;
};

struct Chunk {
    std::string doc_id;
    int section_ordinal = 0;
    int chunk_index = 0;  // document-wide sequence, document order
    std::string text;
    std::optional<TableSlice> table_slice;

    std::string id() const;  // "doc:section:index"

    bool operator==(const Chunk&) const = default;
};

struct CorpusIndex {
    std::map<std::string, DatasheetDoc> documents;              // doc_id -> doc
    std::map<std::string, std::string> alias_map;               // normalized alias -> doc_id
    std::map<std::string, std::vector<std::string>> series_map; // series -> doc_ids
    std::map<std::string, int> doc_freq;                        // lowercase token -> #docs
    std::map<std::string, int> symbol_doc_freq;                 // case-preserved -> #docs
    int doc_count = 0;

    const DatasheetDoc* find(const std::string& doc_id) const;
    const DatasheetDoc* find_by_part(const std::string& raw_part) const;

    // idf(t) = ln(1 + N/df(t)); 0 when the token is unseen.
    double idf(const std::string& lower_token) const;
    double symbol_idf(const std::string& symbol_token) const;
};

// Parse the `.dst` structured datasheet text format: front matter delimited
// by `---` lines, `## ` section headings, pipe-delimited tables.
DatasheetDoc ingest_document(const std::string& raw_text, const std::string& source_name);

// Inverse of ingest_document for documents in canonical (body-then-tables)
// shape; ingest_document(render_document(d)) == d for generator output.
std::string render_document(const DatasheetDoc& doc);

CorpusIndex build_index(const std::vector<DatasheetDoc>& docs);

// Split a document into chunks of at most max_chars characters. Prose chunks
// concatenate back to the section body; every table row lands in exactly one
// slice and every slice repeats the header. Table slices carry a leading
// page-context line ("<part> - <heading>") the way print datasheets repeat
// the device name on every page.
std::vector<Chunk> chunk_document(const DatasheetDoc& doc, int max_chars);

std::string render_table(const ParamTable& table);
std::string render_table_row(const std::vector<std::string>& cells);

// Split one pipe-delimited table line into trimmed cells.
std::vector<std::string> split_table_row(const std::string& line);

}  // namespace dpx
