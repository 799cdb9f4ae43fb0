#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpx/units.hpp"

namespace dpx {

// One operating condition, SI-normalized: ("I_C", 1e-4, "A"). The display
// form keeps what the user typed ("0.1 mA") for verbatim prompt rendering;
// it does not participate in equality.
struct Condition {
    std::string name;
    double value = 0.0;
    std::string unit;  // base unit
    std::string display;

    std::string render() const;

    bool operator==(const Condition& other) const {
        return name == other.name && value == other.value && unit == other.unit;
    }
};

// Canonical key for a condition set: sorted by name, "I_C=0.0001A;V_CE=10V".
// Empty set -> "".
std::string conditions_key(std::vector<Condition> conditions);

// Parse "I_C=0.1 mA, V_CE=10 V" (comma or semicolon separated); pairs whose
// value does not parse as a quantity are skipped.
std::vector<Condition> parse_conditions(std::string_view s);

struct SourceRef {
    std::string doc_id;
    int section_ordinal = 0;
    int chunk_index = 0;

    bool operator==(const SourceRef&) const = default;
};

enum class Confidence { Exact, TypPreferred, FallbackMinMax, Derived };

struct ParamValue {
    double lo = 0.0;
    double hi = 0.0;
    bool is_range = false;

    static ParamValue scalar(double v) { return {v, v, false}; }
    static ParamValue range(double lo, double hi) { return {lo, hi, true}; }
    double midpoint() const { return (lo + hi) / 2.0; }

    bool operator==(const ParamValue&) const = default;
};

struct ParamEntry {
    std::string symbol;
    std::vector<Condition> conditions;  // sorted by name
    ParamValue value;
    std::string unit;  // SI base unit, possibly empty (dimensionless)
    std::optional<SourceRef> source;
    bool derived = false;
    std::string derived_formula;  // provenance for derived entries
    Confidence confidence = Confidence::TypPreferred;

    std::string key() const;  // symbol + "|" + conditions_key
};

// Extracted parameters keyed by (symbol, normalized conditions). A general
// range and a condition-specific value for the same symbol coexist.
struct ParameterSet {
    std::map<std::string, ParamEntry> entries;  // key() -> entry

    void merge(const ParamEntry& entry);  // newer value wins on key collision
    const ParamEntry* find(const std::string& symbol, const std::string& cond_key) const;
    bool has_symbol(const std::string& symbol) const;
    size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

std::string to_string(Confidence c);

}  // namespace dpx
