#include "dpx/params.hpp"

#include <algorithm>

#include "dpx/text.hpp"

namespace dpx {

std::string conditions_key(std::vector<Condition> conditions) {
    std::sort(conditions.begin(), conditions.end(),
              [](const Condition& a, const Condition& b) { return a.name < b.name; });
    std::string out;
    for (const auto& c : conditions) {
        if (!out.empty()) out.push_back(';');
        out += c.name + "=" + text::format_number(c.value) + c.unit;
    }
    return out;
}

std::vector<Condition> parse_conditions(std::string_view s) {
    std::vector<Condition> out;
    std::string buf(s);
    std::replace(buf.begin(), buf.end(), ';', ',');
    for (const auto& piece : text::split_trimmed(buf, ',')) {
        size_t eq = piece.find('=');
        if (eq == std::string::npos) continue;
        std::string name = text::trim(piece.substr(0, eq));
        std::string raw_value = text::trim(piece.substr(eq + 1));
        auto q = units::parse_quantity(raw_value);
        if (name.empty() || !q) continue;
        out.push_back(Condition{name, q->value, q->unit, raw_value});
    }
    std::sort(out.begin(), out.end(),
              [](const Condition& a, const Condition& b) { return a.name < b.name; });
    return out;
}

std::string Condition::render() const {
    if (!display.empty()) return name + "=" + display;
    return name + "=" + text::format_number(value) + (unit.empty() ? "" : " " + unit);
}

std::string ParamEntry::key() const {
    return symbol + "|" + conditions_key(conditions);
}

void ParameterSet::merge(const ParamEntry& entry) {
    entries[entry.key()] = entry;
}

const ParamEntry* ParameterSet::find(const std::string& symbol,
                                     const std::string& cond_key) const {
    auto it = entries.find(symbol + "|" + cond_key);
    return it == entries.end() ? nullptr : &it->second;
}

bool ParameterSet::has_symbol(const std::string& symbol) const {
    std::string prefix = symbol + "|";
    auto it = entries.lower_bound(prefix);
    return it != entries.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

std::string to_string(Confidence c) {
    switch (c) {
        case Confidence::Exact: return "Exact";
        case Confidence::TypPreferred: return "TypPreferred";
        case Confidence::FallbackMinMax: return "FallbackMinMax";
        case Confidence::Derived: return "Derived";
    }
    return "TypPreferred";
}

}  // namespace dpx
