#include "dpx/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string ExtractionRequest::query_text() const {
    std::string q = part_number;
    for (const auto& s : requested_symbols) q += " " + s;
    for (const auto& c : conditions) q += " " + c.render();
    return q;
}

std::string symbol_long_name(const std::string& symbol) {
    static const std::map<std::string, std::string> kNames = {
        {"h_FE", "DC Current Gain"},
        {"hFE", "DC Current Gain"},
        {"VTO", "Gate Threshold Voltage"},
        {"V_GS(th)", "Gate Threshold Voltage"},
        {"BETA", "Conductance Parameter"},
        {"Ciss", "Input Capacitance"},
        {"RS", "Forward Resistance"},
        {"BV", "Breakdown Voltage"},
        {"V_F", "Forward Voltage"},
        {"I_F", "Forward Current"},
        {"Cob", "Output Capacitance"},
        {"C_obo", "Output Capacitance"},
        {"f_T", "Transition Frequency"},
        {"I_D", "On-State Drain Current"},
        {"R_DS(on)", "Drain-Source On-Resistance"},
        {"I_R", "Reverse Leakage Current"},
        {"Cj", "Junction Capacitance"},
        {"C_T", "Junction Capacitance"},
        {"I_V", "Luminous Intensity"},
        {"V_BE(on)", "Base-Emitter On Voltage"},
        {"V_CEO", "Collector-Emitter Sustaining Voltage"},
    };
    auto it = kNames.find(symbol);
    return it == kNames.end() ? "" : it->second;
}

// ---------------------------------------------------------------------------
// Prompt construction
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kSystemPrompt =
    "You are an electronics datasheet analyst. Reason step by step: "
    "(1) identify each table's header row; "
    "(2) locate rows for the requested symbols, including rows listed under an "
    "equivalent parameter name; "
    "(3) prefer the Typ column, falling back to Min and then Max only when Typ "
    "is absent; "
    "(4) when operating conditions are given, select the row whose Conditions "
    "cell matches them; "
    "(5) end with a line 'ANSWER:' followed by one line per symbol: "
    "SYMBOL=VALUE UNIT, or SYMBOL=LO..HI UNIT for a range, with ' @ "
    "conditions' appended for condition-specific values, or SYMBOL=? when the "
    "symbol cannot be resolved.";

std::string join_strings(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

std::string render_chunk_block(const Chunk& c) {
    return "--- chunk doc=" + c.doc_id + " section=" + std::to_string(c.section_ordinal) +
           " idx=" + std::to_string(c.chunk_index) + " ---\n" + c.text + "\n--- end chunk ---";
}

}  // namespace

PromptBuild build_extraction_prompt(const std::vector<Chunk>& chunks,
                                    const ExtractionRequest& req, PromptStage stage,
                                    int max_chars) {
    std::string head = "Part: " + req.part_number + "\n";
    head += "Symbols: " + join_strings(req.requested_symbols, ", ") + "\n";
    if (req.conditions.empty()) {
        head += "Conditions: none\n";
    } else {
        std::vector<std::string> rendered;
        for (const auto& c : req.conditions) rendered.push_back(c.render());
        head += "Conditions: " + join_strings(rendered, ", ") + "\n";
    }
    head += std::string("Stage: ") + (stage == PromptStage::Initial ? "initial" : "refine") + "\n";

    PromptBuild out;
    size_t budget = static_cast<size_t>(max_chars);
    std::string body;
    size_t used = head.size();
    int kept = 0;
    for (const auto& c : chunks) {
        std::string block = "\n" + render_chunk_block(c) + "\n";
        if (kept > 0 && used + block.size() > budget) {
            ++out.dropped_chunks;
            continue;
        }
        if (kept == 0 && used + block.size() > budget) {
            throw PromptTooLong(text::format("first chunk alone exceeds prompt budget %d",
                                             max_chars));
        }
        body += block;
        used += block.size();
        ++kept;
    }
    out.request.system_prompt = kSystemPrompt;
    out.request.user_prompt = head + body;
    return out;
}

// ---------------------------------------------------------------------------
// Rule-based mock completion
// ---------------------------------------------------------------------------

namespace {

struct PromptTableRow {
    std::string doc_id;
    int parameter_col = -1;
    int symbol_col = -1;
    int min_col = -1;
    int typ_col = -1;
    int max_col = -1;
    int unit_col = -1;
    int conditions_col = -1;
    std::vector<std::string> cells;

    std::string cell(int col) const {
        return (col >= 0 && col < static_cast<int>(cells.size())) ? cells[col] : "";
    }
};

struct ParsedPrompt {
    std::string part;
    std::vector<std::string> symbols;
    std::vector<Condition> conditions;
    std::vector<PromptTableRow> rows;  // prompt order
    std::set<std::string> table_docs;  // docs that contributed at least one row
};

ParsedPrompt parse_prompt(const std::string& user_prompt) {
    ParsedPrompt out;
    std::istringstream in(user_prompt);
    std::string line;
    std::string current_doc;
    bool in_chunk = false;
    std::vector<std::string> table_lines;

    auto flush_table = [&]() {
        if (table_lines.size() < 2) {
            table_lines.clear();
            return;
        }
        auto columns = split_table_row(table_lines.front());
        PromptTableRow proto;
        proto.doc_id = current_doc;
        auto col_of = [&](std::string_view name) {
            for (size_t i = 0; i < columns.size(); ++i) {
                if (text::to_lower(columns[i]) == text::to_lower(name))
                    return static_cast<int>(i);
            }
            return -1;
        };
        proto.parameter_col = col_of("Parameter");
        proto.symbol_col = col_of("Symbol");
        proto.min_col = col_of("Min");
        proto.typ_col = col_of("Typ");
        proto.max_col = col_of("Max");
        proto.unit_col = col_of("Unit");
        proto.conditions_col = col_of("Conditions");
        for (size_t i = 1; i < table_lines.size(); ++i) {
            auto cells = split_table_row(table_lines[i]);
            if (cells.size() != columns.size()) continue;
            PromptTableRow row = proto;
            row.cells = std::move(cells);
            out.rows.push_back(std::move(row));
            out.table_docs.insert(current_doc);
        }
        table_lines.clear();
    };

    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (t.rfind("--- chunk ", 0) == 0) {
            in_chunk = true;
            current_doc.clear();
            size_t pos = t.find("doc=");
            if (pos != std::string::npos) {
                size_t end = t.find(' ', pos);
                current_doc = t.substr(pos + 4, end == std::string::npos ? std::string::npos
                                                                         : end - pos - 4);
            }
            continue;
        }
        if (t == "--- end chunk ---") {
            flush_table();
            in_chunk = false;
            continue;
        }
        if (in_chunk) {
            if (!t.empty() && t.front() == '|') {
                table_lines.push_back(t);
            } else {
                flush_table();
            }
            continue;
        }
        if (t.rfind("Part: ", 0) == 0) {
            out.part = text::trim(t.substr(6));
        } else if (t.rfind("Symbols: ", 0) == 0) {
            out.symbols = text::split_trimmed(t.substr(9), ',');
        } else if (t.rfind("Conditions: ", 0) == 0) {
            std::string rest = text::trim(t.substr(12));
            if (rest != "none") out.conditions = parse_conditions(rest);
        }
    }
    flush_table();
    return out;
}

bool conditions_satisfied(const std::vector<Condition>& cell_conds,
                          const std::vector<Condition>& requested) {
    if (cell_conds.empty()) return false;
    for (const auto& cc : cell_conds) {
        bool found = false;
        for (const auto& rc : requested) {
            if (rc.name != cc.name || rc.unit != cc.unit) continue;
            double scale = std::max(std::abs(rc.value), 1e-12);
            if (std::abs(rc.value - cc.value) <= 1e-6 * scale) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::optional<std::pair<double, std::string>> numeric_cell(const PromptTableRow& row, int col) {
    std::string cell = row.cell(col);
    if (!units::is_numeric_cell(cell)) return std::nullopt;
    auto q = units::parse_quantity(cell);
    if (!q) return std::nullopt;
    // Scale by the row's Unit column when the cell itself carries no unit.
    if (q->unit.empty()) {
        auto [factor, base] = units::normalize_unit(row.cell(row.unit_col));
        return std::make_pair(q->value * factor, base);
    }
    return std::make_pair(q->value, q->unit);
}

// "0.015 A" also echoed as "15 mA" and "15000 uA" so a lexical retriever can
// bridge to whichever scaling the datasheet table uses.
std::string condition_echo(const Condition& c) {
    std::string out = c.render() + " (";
    std::vector<std::string> forms;
    forms.push_back(text::format_number(c.value) + (c.unit.empty() ? "" : " " + c.unit));
    if (!c.unit.empty()) {
        forms.push_back(text::format_number(c.value * 1e3) + " m" + c.unit);
        if (std::abs(c.value) < 1.0) {
            forms.push_back(text::format_number(c.value * 1e6) + " u" + c.unit);
        }
    }
    out += join_strings(forms, ", ") + ")";
    return out;
}

struct SymbolResolution {
    std::optional<ParamEntry> entry;
    std::vector<std::string> notes;
};

SymbolResolution resolve_symbol(const std::string& sym, const std::vector<PromptTableRow*>& pool,
                                const std::vector<Condition>& requested,
                                const MockScript& script) {
    SymbolResolution res;
    std::string long_name = symbol_long_name(sym);

    std::vector<const PromptTableRow*> exact, byname;
    for (const auto* row : pool) {
        if (text::trim(row->cell(row->symbol_col)) == sym) {
            exact.push_back(row);
        } else if (!long_name.empty() && row->parameter_col >= 0 &&
                   text::icontains(row->cell(row->parameter_col), long_name)) {
            byname.push_back(row);
        }
    }
    // Exact symbol-cell matches outrank parameter-name matches.
    const auto& matched = exact.empty() ? byname : exact;

    // Note wording stays terse and avoids common English filler: these notes
    // feed back into the next retrieval query, where high-frequency words
    // would spuriously boost prose chunks.
    if (matched.empty()) {
        res.notes.push_back("NOTE " + sym + ": zero matching rows. Search hint: " +
                            (long_name.empty() ? sym : long_name) + ".");
        return res;
    }

    auto pick_scalar = [&](const PromptTableRow& row) -> std::optional<ParamEntry> {
        struct Cand {
            int col;
            Confidence conf;
            const char* label;
        };
        std::vector<Cand> order;
        if (script.typ_preference) {
            order = {{row.typ_col, Confidence::TypPreferred, "Typ"},
                     {row.min_col, Confidence::FallbackMinMax, "Min"},
                     {row.max_col, Confidence::FallbackMinMax, "Max"}};
        } else {
            order = {{row.min_col, Confidence::FallbackMinMax, "Min"},
                     {row.typ_col, Confidence::TypPreferred, "Typ"},
                     {row.max_col, Confidence::FallbackMinMax, "Max"}};
        }
        for (const auto& cand : order) {
            auto v = numeric_cell(row, cand.col);
            if (!v) continue;
            ParamEntry entry;
            entry.symbol = sym;
            entry.value = ParamValue::scalar(v->first);
            entry.unit = v->second;
            entry.confidence = cand.conf;
            res.notes.push_back(sym + ": " + std::string(cand.label) + " column taken.");
            return entry;
        }
        return std::nullopt;
    };

    // Condition-specific row selection.
    if (!requested.empty() && script.condition_matching) {
        for (const auto* row : matched) {
            if (row->conditions_col < 0) continue;
            auto cell_conds = parse_conditions(row->cell(row->conditions_col));
            if (!conditions_satisfied(cell_conds, requested)) continue;
            auto entry = pick_scalar(*row);
            if (!entry) continue;
            entry->conditions = requested;
            entry->confidence = Confidence::Exact;
            res.entry = std::move(entry);
            return res;
        }
        // No match: fall through to the general answer, echoing the wanted
        // conditions in several unit scalings so a later retrieval pass can
        // land on the row however the table spells them. The parameter name
        // stays out of this note: the rows are already findable by symbol,
        // and name fragments would drag in sibling rows.
        std::vector<std::string> echoes;
        for (const auto& c : requested) echoes.push_back(condition_echo(c));
        res.notes.push_back("NOTE " + sym + ": zero rows match requested conditions " +
                            join_strings(echoes, "; ") + ".");
    }

    if (matched.size() == 1) {
        const PromptTableRow& row = *matched.front();
        res.entry = pick_scalar(row);
        if (!res.entry) {
            res.notes.push_back("NOTE " + sym + ": matched row lacks numeric cells.");
        } else if (row.conditions_col >= 0) {
            // A lone row's value holds at whatever test conditions its
            // Conditions cell states.
            res.entry->conditions = parse_conditions(row.cell(row.conditions_col));
        }
        return res;
    }

    // Multiple rows and no condition narrowing: report the min-max span.
    double lo = 0, hi = 0;
    std::string unit;
    bool any = false;
    for (const auto* row : matched) {
        for (int col : {row->min_col, row->typ_col, row->max_col}) {
            auto v = numeric_cell(*row, col);
            if (!v) continue;
            if (!any) {
                lo = hi = v->first;
                unit = v->second;
                any = true;
            } else {
                lo = std::min(lo, v->first);
                hi = std::max(hi, v->first);
            }
        }
    }
    if (!any) {
        res.notes.push_back("NOTE " + sym + ": matched rows lack numeric cells.");
        return res;
    }
    ParamEntry entry;
    entry.symbol = sym;
    entry.unit = unit;
    entry.confidence = Confidence::FallbackMinMax;
    entry.value = (lo == hi) ? ParamValue::scalar(lo) : ParamValue::range(lo, hi);
    res.notes.push_back(text::format("%s: %zu rows pooled; min-max span reported.",
                                     sym.c_str(), matched.size()));
    res.entry = std::move(entry);
    return res;
}

}  // namespace

std::string mock_rule_complete(const ChatRequest& req, const MockScript& script) {
    ParsedPrompt prompt = parse_prompt(req.user_prompt);

    std::string part_norm = text::normalize_part(prompt.part);
    bool restrict = false;
    for (const auto& d : prompt.table_docs) {
        if (text::normalize_part(d) == part_norm) restrict = true;
    }

    std::vector<PromptTableRow*> pool;
    for (auto& row : prompt.rows) {
        if (!restrict || text::normalize_part(row.doc_id) == part_norm) pool.push_back(&row);
    }

    std::string out = text::format("Excerpt scan: part %s; usable rows: %zu.\n",
                                   prompt.part.c_str(), pool.size());
    if (restrict) {
        out += "Provenance: matching-part excerpts located; non-matching excerpts ignored.\n";
    } else if (!prompt.table_docs.empty()) {
        out += "Provenance: zero matching-part excerpts; every provided excerpt considered.\n";
    }

    ParameterSet answers;
    std::vector<std::string> answer_lines;
    for (const auto& sym : prompt.symbols) {
        SymbolResolution res = resolve_symbol(sym, pool, prompt.conditions, script);
        for (const auto& n : res.notes) out += n + "\n";
        if (res.entry) {
            answers.merge(*res.entry);
        } else {
            answer_lines.push_back(sym + "=?");
        }
    }

    out += "ANSWER:\n";
    std::string block = render_answer_block(answers);
    if (!block.empty()) out += block + "\n";
    for (const auto& l : answer_lines) out += l + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Answer block rendering and parsing
// ---------------------------------------------------------------------------

std::string render_answer_block(const ParameterSet& params) {
    std::vector<std::string> lines;
    for (const auto& [key, e] : params.entries) {
        std::string line = e.symbol + "=";
        line += text::format_number(e.value.lo);
        if (e.value.is_range) line += ".." + text::format_number(e.value.hi);
        if (!e.unit.empty()) line += " " + e.unit;
        if (!e.conditions.empty()) {
            std::vector<std::string> conds;
            for (const auto& c : e.conditions) {
                conds.push_back(c.name + "=" + text::format_number(c.value) +
                                (c.unit.empty() ? "" : " " + c.unit));
            }
            line += " @ " + join_strings(conds, "; ");
        }
        lines.push_back(std::move(line));
    }
    return join_strings(lines, "\n");
}

namespace {

std::optional<ParamEntry> parse_answer_line(const std::string& line) {
    size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0) return std::nullopt;
    std::string sym = text::trim(line.substr(0, eq));
    if (sym.empty() || sym.find(' ') != std::string::npos) return std::nullopt;
    std::string rhs = text::trim(line.substr(eq + 1));
    if (rhs.empty()) return std::nullopt;

    ParamEntry entry;
    entry.symbol = sym;

    if (rhs == "?") {
        // Explicit unresolved marker: valid grammar, no entry.
        entry.symbol.clear();
        return entry;
    }

    std::string value_part = rhs;
    size_t at = rhs.find(" @ ");
    if (at != std::string::npos) {
        value_part = text::trim(rhs.substr(0, at));
        std::string cond_part = text::trim(rhs.substr(at + 3));
        if (cond_part != "none") {
            entry.conditions = parse_conditions(cond_part);
            if (entry.conditions.empty()) return std::nullopt;
        }
    }

    // Split ranges on ".." before strtod: "40..300" would otherwise parse
    // its first number as "40." and swallow a dot.
    std::string lo_part = value_part;
    std::string hi_part;
    bool is_range = false;
    if (size_t dots = value_part.find(".."); dots != std::string::npos) {
        lo_part = text::trim(value_part.substr(0, dots));
        hi_part = value_part.substr(dots + 2);
        is_range = true;
    }
    const char* begin = lo_part.c_str();
    char* end = nullptr;
    double lo = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    double hi = lo;
    std::string rest = end;  // unit follows the scalar
    if (is_range) {
        if (!text::trim(rest).empty()) return std::nullopt;  // junk between lo and ".."
        const char* b2 = hi_part.c_str();
        char* e2 = nullptr;
        hi = std::strtod(b2, &e2);
        if (e2 == b2) return std::nullopt;
        rest = e2;
    }
    auto [factor, base] = units::normalize_unit(text::trim(rest));
    entry.value = is_range ? ParamValue::range(lo * factor, hi * factor)
                           : ParamValue::scalar(lo * factor);
    entry.unit = base;
    entry.confidence = is_range ? Confidence::FallbackMinMax
                       : entry.conditions.empty() ? Confidence::TypPreferred
                                                  : Confidence::Exact;
    return entry;
}

}  // namespace

ParameterSet parse_extraction_output(const std::string& output_text) {
    std::istringstream in(output_text);
    std::string line;
    bool in_block = false;
    bool found = false;
    ParameterSet params;
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (!in_block) {
            if (t == "ANSWER:") {
                in_block = true;
                found = true;
            }
            continue;
        }
        if (t.empty()) break;
        auto entry = parse_answer_line(t);
        if (!entry) break;
        if (!entry->symbol.empty()) params.merge(*entry);
    }
    if (!found) throw ParseError("no ANSWER: block in backend output");
    return params;
}

// ---------------------------------------------------------------------------
// Mock backend
// ---------------------------------------------------------------------------

struct MockBackend::Impl {
    MockScript script;
    std::mutex mutex;
    size_t next_canned = 0;
    int calls = 0;
};

MockBackend::MockBackend(MockScript script) : impl_(std::make_shared<Impl>()) {
    impl_->script = std::move(script);
}

CompletionResult MockBackend::complete(const ChatRequest& req) {
    auto t0 = Clock::now();
    if (impl_->script.inject_delay_ms > 0) {
        std::this_thread::sleep_for(
            std::chrono::duration<double, std::milli>(impl_->script.inject_delay_ms));
    }
    std::string out;
    {
        std::lock_guard<std::mutex> lock(impl_->mutex);
        ++impl_->calls;
        if (impl_->script.mode == MockMode::Canned) {
            const auto& canned = impl_->script.canned;
            if (canned.empty()) throw BackendError("canned mock has no responses");
            size_t i = std::min(impl_->next_canned, canned.size() - 1);
            ++impl_->next_canned;
            out = canned[i];
        }
    }
    if (impl_->script.mode == MockMode::RuleBased) {
        out = mock_rule_complete(req, impl_->script);
    }
    return CompletionResult{std::move(out), ms_since(t0), id()};
}

int MockBackend::calls() const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->calls;
}

}  // namespace dpx
