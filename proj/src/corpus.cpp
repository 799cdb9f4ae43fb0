#include "dpx/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

namespace {

bool is_table_line(const std::string& line) {
    std::string t = text::trim(line);
    return !t.empty() && t.front() == '|';
}

bool is_separator_row(const std::vector<std::string>& cells) {
    if (cells.empty()) return false;
    for (const auto& c : cells) {
        if (c.find_first_not_of("-: ") != std::string::npos) return false;
    }
    return true;
}

void finish_table(std::vector<std::string>& pending, int header_line, Section& section) {
    if (pending.empty()) return;
    ParamTable table;
    table.columns = split_table_row(pending.front());
    if (table.column_index("Parameter") < 0 && table.column_index("Symbol") < 0) {
        throw MalformedTable("table header lacks a Parameter/Symbol column", header_line);
    }
    int line = header_line;
    for (size_t i = 1; i < pending.size(); ++i) {
        ++line;
        auto cells = split_table_row(pending[i]);
        if (is_separator_row(cells)) continue;
        if (cells.size() != table.columns.size()) {
            throw MalformedTable(
                text::format("table row has %zu cells, header has %zu", cells.size(),
                             table.columns.size()),
                line);
        }
        table.rows.push_back(std::move(cells));
    }
    section.tables.push_back(std::move(table));
    pending.clear();
}

std::string strip_extension(const std::string& name) {
    size_t slash = name.find_last_of("/\\");
    std::string base = (slash == std::string::npos) ? name : name.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    return (dot == std::string::npos) ? base : base.substr(0, dot);
}

std::string join_trimmed_body(const std::vector<std::string>& lines) {
    size_t b = 0, e = lines.size();
    auto blank = [](const std::string& s) { return text::trim(s).empty(); };
    while (b < e && blank(lines[b])) ++b;
    while (e > b && blank(lines[e - 1])) --e;
    std::string out;
    for (size_t i = b; i < e; ++i) {
        if (i > b) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

}  // namespace

std::string to_string(SectionKind kind) {
    switch (kind) {
        case SectionKind::ElectricalCharacteristics: return "ElectricalCharacteristics";
        case SectionKind::AbsoluteMaximumRatings: return "AbsoluteMaximumRatings";
        case SectionKind::TypicalPerformanceCurves: return "TypicalPerformanceCurves";
        case SectionKind::ThermalCharacteristics: return "ThermalCharacteristics";
        case SectionKind::PackageInformation: return "PackageInformation";
        case SectionKind::Other: return "Other";
    }
    return "Other";
}

int ParamTable::column_index(std::string_view name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (text::to_lower(columns[i]) == text::to_lower(name)) return static_cast<int>(i);
    }
    return -1;
}

std::string Chunk::id() const {
    return doc_id + ":" + std::to_string(section_ordinal) + ":" + std::to_string(chunk_index);
}

DatasheetDoc ingest_document(const std::string& raw_text, const std::string& source_name) {
    std::vector<std::string> lines;
    {
        std::istringstream in(raw_text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }

    size_t i = 0;
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i >= lines.size() || text::trim(lines[i]) != "---") {
        throw MissingFrontMatter("no front-matter block in " + source_name);
    }
    ++i;

    DatasheetDoc doc;
    doc.doc_id = text::to_lower(strip_extension(source_name));
    for (; i < lines.size() && text::trim(lines[i]) != "---"; ++i) {
        std::string line = text::trim(lines[i]);
        if (line.empty()) continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = text::trim(line.substr(0, colon));
        std::string value = text::trim(line.substr(colon + 1));
        if (key == "part_number") {
            doc.meta.part_number = text::normalize_part(value);
        } else if (key == "series") {
            doc.meta.series = text::normalize_part(value);
        } else if (key == "manufacturer") {
            doc.meta.manufacturer = value;
        } else if (key == "keywords") {
            doc.meta.device_keywords = text::split_trimmed(value, ',');
        } else if (key == "aliases") {
            doc.meta.aliases = text::split_trimmed(value, ',');
        }
    }
    if (i >= lines.size()) throw MissingFrontMatter("unterminated front matter in " + source_name);
    ++i;  // closing ---

    if (doc.meta.part_number.empty()) {
        throw MissingFrontMatter("front matter lacks part_number in " + source_name);
    }
    // The part number is always resolvable as one of its own aliases.
    bool has_self = false;
    for (const auto& a : doc.meta.aliases) {
        if (text::normalize_part(a) == doc.meta.part_number) has_self = true;
    }
    if (!has_self) doc.meta.aliases.insert(doc.meta.aliases.begin(), doc.meta.part_number);
    // Derived series: leading 5 characters when no explicit tag is given.
    if (doc.meta.series.empty() && doc.meta.part_number.size() > 5) {
        doc.meta.series = doc.meta.part_number.substr(0, 5);
    }

    Section current;
    bool in_section = false;
    std::vector<std::string> body_lines;
    std::vector<std::string> pending_table;
    int table_start_line = 0;

    auto flush_section = [&]() {
        if (!in_section) return;
        finish_table(pending_table, table_start_line, current);
        current.body_text = join_trimmed_body(body_lines);
        current.ordinal = static_cast<int>(doc.sections.size());
        doc.sections.push_back(std::move(current));
        current = Section{};
        body_lines.clear();
    };

    for (; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.rfind("## ", 0) == 0) {
            flush_section();
            in_section = true;
            current.heading = text::trim(line.substr(3));
            continue;
        }
        if (!in_section) continue;  // preamble text before the first heading
        if (is_table_line(line)) {
            if (pending_table.empty()) table_start_line = static_cast<int>(i) + 1;
            pending_table.push_back(line);
        } else {
            finish_table(pending_table, table_start_line, current);
            body_lines.push_back(line);
        }
    }
    flush_section();

    if (doc.sections.empty()) throw EmptyDocument("no sections in " + source_name);
    return doc;
}

std::vector<std::string> split_table_row(const std::string& line) {
    std::string t = text::trim(line);
    // Drop the leading pipe; a trailing pipe produces one empty tail piece.
    std::vector<std::string> cells;
    size_t start = 1;
    while (start <= t.size()) {
        size_t pos = t.find('|', start);
        if (pos == std::string::npos) {
            std::string tail = text::trim(t.substr(start));
            if (!tail.empty()) cells.push_back(tail);
            break;
        }
        cells.push_back(text::trim(t.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

std::string render_table_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) {
        out += " " + c + " |";
    }
    return out;
}

std::string render_table(const ParamTable& table) {
    std::string out = render_table_row(table.columns);
    for (const auto& row : table.rows) {
        out += "\n" + render_table_row(row);
    }
    return out;
}

std::string render_document(const DatasheetDoc& doc) {
    std::string out = "---\n";
    out += "part_number: " + doc.meta.part_number + "\n";
    if (!doc.meta.series.empty()) out += "series: " + doc.meta.series + "\n";
    if (!doc.meta.manufacturer.empty()) out += "manufacturer: " + doc.meta.manufacturer + "\n";
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    if (!doc.meta.device_keywords.empty()) out += "keywords: " + join(doc.meta.device_keywords) + "\n";
    if (!doc.meta.aliases.empty()) out += "aliases: " + join(doc.meta.aliases) + "\n";
    out += "---\n";
    for (const auto& sec : doc.sections) {
        out += "\n## " + sec.heading + "\n";
        if (!sec.body_text.empty()) out += sec.body_text + "\n";
        for (const auto& table : sec.tables) {
            out += "\n" + render_table(table) + "\n";
        }
    }
    return out;
}

CorpusIndex build_index(const std::vector<DatasheetDoc>& docs) {
    CorpusIndex index;
    for (const auto& doc : docs) {
        if (index.documents.count(doc.doc_id)) {
            throw DuplicateDocId("duplicate doc_id " + doc.doc_id);
        }
        index.documents.emplace(doc.doc_id, doc);
    }
    index.doc_count = static_cast<int>(index.documents.size());

    for (const auto& [doc_id, doc] : index.documents) {
        for (const auto& alias : doc.meta.aliases) {
            std::string key = text::normalize_part(alias);
            if (key.empty()) continue;
            auto [it, inserted] = index.alias_map.emplace(key, doc_id);
            if (!inserted && it->second != doc_id) {
                throw DuplicateAlias("alias " + key + " claimed by " + it->second + " and " +
                                     doc_id);
            }
        }
        if (!doc.meta.series.empty()) {
            index.series_map[doc.meta.series].push_back(doc_id);
        }

        std::set<std::string> seen_lower;
        std::set<std::string> seen_symbols;
        auto absorb = [&](const std::string& s) {
            for (auto& t : text::lower_tokens(s)) seen_lower.insert(t);
            for (auto& t : text::symbol_tokens(s)) seen_symbols.insert(t);
        };
        absorb(doc.meta.part_number);
        for (const auto& a : doc.meta.aliases) absorb(a);
        for (const auto& sec : doc.sections) {
            absorb(sec.heading);
            absorb(sec.body_text);
            for (const auto& table : sec.tables) {
                for (const auto& col : table.columns) absorb(col);
                for (const auto& row : table.rows) {
                    for (const auto& cell : row) absorb(cell);
                }
            }
        }
        for (const auto& t : seen_lower) index.doc_freq[t] += 1;
        for (const auto& t : seen_symbols) index.symbol_doc_freq[t] += 1;
    }
    return index;
}

const DatasheetDoc* CorpusIndex::find(const std::string& doc_id) const {
    auto it = documents.find(doc_id);
    return it == documents.end() ? nullptr : &it->second;
}

const DatasheetDoc* CorpusIndex::find_by_part(const std::string& raw_part) const {
    auto it = alias_map.find(text::normalize_part(raw_part));
    return it == alias_map.end() ? nullptr : find(it->second);
}

double CorpusIndex::idf(const std::string& lower_token) const {
    auto it = doc_freq.find(lower_token);
    if (it == doc_freq.end() || it->second == 0) return 0.0;
    return std::log(1.0 + static_cast<double>(doc_count) / it->second);
}

double CorpusIndex::symbol_idf(const std::string& symbol_token) const {
    auto it = symbol_doc_freq.find(symbol_token);
    if (it == symbol_doc_freq.end() || it->second == 0) return 0.0;
    return std::log(1.0 + static_cast<double>(doc_count) / it->second);
}

std::vector<Chunk> chunk_document(const DatasheetDoc& doc, int max_chars) {
    if (max_chars < 200) throw Error("chunk budget must be at least 200 characters");
    std::vector<Chunk> chunks;
    int next_index = 0;

    auto push = [&](int ordinal, std::string text_out, std::optional<TableSlice> slice) {
        Chunk c;
        c.doc_id = doc.doc_id;
        c.section_ordinal = ordinal;
        c.chunk_index = next_index++;
        c.text = std::move(text_out);
        c.table_slice = std::move(slice);
        chunks.push_back(std::move(c));
    };

    for (const auto& sec : doc.sections) {
        // Prose: split at newline/space boundaries so the pieces concatenate
        // back to the exact body text.
        std::string_view body = sec.body_text;
        while (!body.empty()) {
            size_t take = std::min<size_t>(body.size(), static_cast<size_t>(max_chars));
            if (take < body.size()) {
                size_t nl = body.rfind('\n', take - 1);
                size_t sp = body.rfind(' ', take - 1);
                size_t cut = (nl != std::string_view::npos && nl > 0) ? nl + 1
                             : (sp != std::string_view::npos && sp > 0) ? sp + 1
                                                                        : take;
                take = cut;
            }
            push(sec.ordinal, std::string(body.substr(0, take)), std::nullopt);
            body.remove_prefix(take);
        }

        std::string context_line = doc.meta.part_number + " - " + sec.heading;
        for (size_t ti = 0; ti < sec.tables.size(); ++ti) {
            const ParamTable& table = sec.tables[ti];
            std::string header = render_table_row(table.columns);
            size_t row = 0;
            while (row < table.rows.size()) {
                TableSlice slice;
                slice.columns = table.columns;
                slice.table_index = static_cast<int>(ti);
                slice.first_row = static_cast<int>(row);
                std::string body_out = context_line + "\n" + header;
                // Always take at least one row per slice.
                do {
                    std::string rendered = render_table_row(table.rows[row]);
                    if (!slice.rows.empty() &&
                        body_out.size() + 1 + rendered.size() > static_cast<size_t>(max_chars)) {
                        break;
                    }
                    body_out += "\n" + rendered;
                    slice.rows.push_back(table.rows[row]);
                    ++row;
                } while (row < table.rows.size());
                push(sec.ordinal, std::move(body_out), std::move(slice));
            }
            // A table with no rows still yields its header as one slice.
            if (table.rows.empty()) {
                TableSlice slice;
                slice.columns = table.columns;
                slice.table_index = static_cast<int>(ti);
                push(sec.ordinal, context_line + "\n" + header, std::move(slice));
            }
        }
    }
    return chunks;
}

}  // namespace dpx
