#include "dpx/devicegen.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

std::string to_string(DeviceFamily family) {
    switch (family) {
        case DeviceFamily::BJT_NPN: return "BJT_NPN";
        case DeviceFamily::BJT_PNP: return "BJT_PNP";
        case DeviceFamily::NMOS: return "NMOS";
        case DeviceFamily::PMOS: return "PMOS";
        case DeviceFamily::Diode: return "Diode";
        case DeviceFamily::LED: return "LED";
        case DeviceFamily::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string to_string(DeviceKind kind) {
    return kind == DeviceKind::Static ? "Static" : "Dynamic";
}

namespace {

struct FamilyKeyword {
    const char* keyword;
    DeviceFamily family;
    DeviceKind kind;
};

// Precedence order is fixed; first hit wins.
constexpr std::array<FamilyKeyword, 6> kFamilyKeywords = {{
    {"NPN", DeviceFamily::BJT_NPN, DeviceKind::Dynamic},
    {"PNP", DeviceFamily::BJT_PNP, DeviceKind::Dynamic},
    {"NMOS", DeviceFamily::NMOS, DeviceKind::Dynamic},
    {"PMOS", DeviceFamily::PMOS, DeviceKind::Dynamic},
    {"LED", DeviceFamily::LED, DeviceKind::Static},
    {"DIODE", DeviceFamily::Diode, DeviceKind::Static},
}};

bool contains_word(const std::string& haystack, const std::string& needle) {
    std::string h = text::to_lower(haystack);
    std::string n = text::to_lower(needle);
    size_t pos = 0;
    while ((pos = h.find(n, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(h[pos - 1]));
        size_t end = pos + n.size();
        bool right_ok = end >= h.size() || !std::isalnum(static_cast<unsigned char>(h[end]));
        if (left_ok && right_ok) return true;
        pos = end;
    }
    return false;
}

}  // namespace

DeviceClass classify_device(const DatasheetDoc& doc) {
    for (const auto& fk : kFamilyKeywords) {
        for (const auto& kw : doc.meta.device_keywords) {
            if (contains_word(kw, fk.keyword)) return DeviceClass{fk.kind, fk.family};
        }
    }
    for (const auto& fk : kFamilyKeywords) {
        for (const auto& sec : doc.sections) {
            if (contains_word(sec.heading, fk.keyword) || contains_word(sec.body_text, fk.keyword)) {
                return DeviceClass{fk.kind, fk.family};
            }
        }
    }
    return DeviceClass{DeviceKind::Static, DeviceFamily::Unknown};
}

ParamEntry derive_rs_ohms_law(const units::Quantity& v_f, const units::Quantity& i_f) {
    if (i_f.value == 0.0) throw ZeroCurrent("forward current is zero; cannot derive RS");
    ParamEntry entry;
    entry.symbol = "RS";
    entry.value = ParamValue::scalar(v_f.value / i_f.value);
    entry.unit = "Ohm";
    entry.derived = true;
    entry.derived_formula = "ohms_law(V_F/I_F)";
    entry.confidence = Confidence::Derived;
    return entry;
}

MappingTable MappingTable::defaults() {
    MappingTable t;
    t.symbol_to_key = {
        {"h_FE", "BF"}, {"hFE", "BF"},  {"VTO", "VTO"}, {"BETA", "KP"},
        {"Ciss", "CGS"}, {"RS", "RS"},  {"BV", "BV"},   {"V_F", "VF"},
    };
    return t;
}

namespace {

const char* spice_type(DeviceFamily family) {
    switch (family) {
        case DeviceFamily::BJT_NPN: return "NPN";
        case DeviceFamily::BJT_PNP: return "PNP";
        case DeviceFamily::NMOS: return "NMOS";
        case DeviceFamily::PMOS: return "PMOS";
        case DeviceFamily::Diode:
        case DeviceFamily::LED: return "D";
        case DeviceFamily::Unknown: return nullptr;
    }
    return nullptr;
}

std::vector<std::string> required_symbols(DeviceFamily family) {
    switch (family) {
        case DeviceFamily::BJT_NPN:
        case DeviceFamily::BJT_PNP: return {"h_FE"};
        case DeviceFamily::NMOS:
        case DeviceFamily::PMOS: return {"VTO"};
        case DeviceFamily::Diode:
        case DeviceFamily::LED: return {"RS", "BV"};  // at least one
        case DeviceFamily::Unknown: return {};
    }
    return {};
}

// Best entry per symbol for card rendering: prefer condition-specific exact
// values, then general scalars, then ranges.
const ParamEntry* best_entry(const ParameterSet& params, const std::string& symbol) {
    const ParamEntry* best = nullptr;
    auto rank = [](const ParamEntry& e) {
        if (e.confidence == Confidence::Exact) return 0;
        if (!e.value.is_range) return 1;
        return 2;
    };
    for (const auto& [key, e] : params.entries) {
        if (e.symbol != symbol) continue;
        if (!best || rank(e) < rank(*best)) best = &e;
    }
    return best;
}

}  // namespace

SpiceModel generate_model_card(const ParameterSet& params, DeviceFamily family,
                               const std::string& name, const MappingTable& mapping) {
    const char* type = spice_type(family);
    if (!type) throw UnknownFamily("cannot render a model card for an unknown device family");

    auto required = required_symbols(family);
    bool any_required = false;
    for (const auto& sym : required) {
        if (best_entry(params, sym)) any_required = true;
    }
    if (!required.empty() && !any_required) {
        // Diode/LED accept either of RS/BV; other families have one required
        // symbol, so "any" and "all" coincide.
        throw MissingRequiredParameter(required.front(), to_string(family));
    }

    SpiceModel model;
    model.name = name;
    model.family = family;

    std::vector<std::string> unmapped;
    std::vector<std::string> range_notes;
    // Deterministic parameter order: walk symbols in ParameterSet order;
    // duplicate card keys keep the first-seen value.
    std::vector<std::string> symbols_seen;
    for (const auto& [key, e] : params.entries) {
        if (std::find(symbols_seen.begin(), symbols_seen.end(), e.symbol) != symbols_seen.end())
            continue;
        symbols_seen.push_back(e.symbol);
    }
    for (const auto& symbol : symbols_seen) {
        const ParamEntry* entry = best_entry(params, symbol);
        auto it = mapping.symbol_to_key.find(symbol);
        if (it == mapping.symbol_to_key.end()) {
            unmapped.push_back(symbol + "=" +
                               text::format_number(entry->value.is_range ? entry->value.midpoint()
                                                                         : entry->value.lo));
            continue;
        }
        double value = entry->value.is_range ? entry->value.midpoint() : entry->value.lo;
        bool duplicate = false;
        for (const auto& [k, v] : model.card_params) {
            if (k == it->second) duplicate = true;
        }
        if (duplicate) continue;
        if (entry->value.is_range) {
            range_notes.push_back(it->second + " from range midpoint " +
                                  text::format_number(entry->value.lo) + ".." +
                                  text::format_number(entry->value.hi));
        }
        model.card_params.emplace_back(it->second, text::format_number(value));
    }

    std::string card = ".model " + name + " " + type + " (";
    for (size_t i = 0; i < model.card_params.size(); ++i) {
        if (i) card += " ";
        card += model.card_params[i].first + "=" + model.card_params[i].second;
    }
    card += ")";
    for (const auto& note : range_notes) card += "\n* " + note;
    if (!unmapped.empty()) {
        card += "\n* unmapped:";
        for (const auto& u : unmapped) card += " " + u;
    }
    model.rendered_card = card;
    model.rendered_script = generate_sim_script(model);
    return model;
}

std::string generate_sim_script(const SpiceModel& model) {
    const char* type = spice_type(model.family);
    std::string lower_type = type ? text::to_lower(type) : "d";

    std::string params_kwargs;
    for (const auto& [k, v] : model.card_params) {
        params_kwargs += ", " + k + "=" + v;
    }

    std::string element;
    switch (model.family) {
        case DeviceFamily::BJT_NPN:
        case DeviceFamily::BJT_PNP:
            element = "circuit.BJT(1, 'collector', 'base', 'emitter', model='" + model.name + "')";
            break;
        case DeviceFamily::NMOS:
        case DeviceFamily::PMOS:
            element = "circuit.MOSFET(1, 'drain', 'gate', 'source', 'source', model='" +
                      model.name + "')";
            break;
        default:
            element = "circuit.Diode(1, 'anode', 'cathode', model='" + model.name + "')";
            break;
    }

    std::string script;
    script += "from PySpice.Spice.Netlist import Circuit\n";
    script += "from PySpice.Unit import *\n";
    script += "\n";
    script += "circuit = Circuit('" + model.name + " bench')\n";
    script += "circuit.model('" + model.name + "', '" + lower_type + "'" + params_kwargs + ")\n";
    script += element + "\n";
    script += "\n";
    script += "if __name__ == '__main__':\n";
    script += "    print(circuit)\n";
    return script;
}

bool card_is_well_formed(const std::string& card) {
    std::string first_line = card.substr(0, card.find('\n'));
    if (first_line.rfind(".model ", 0) != 0) return false;
    size_t open = first_line.find('(');
    size_t close = first_line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) return false;

    auto head = text::split_trimmed(first_line.substr(7, open - 7), ' ');
    if (head.size() != 2) return false;  // name + type token

    std::string body = first_line.substr(open + 1, close - open - 1);
    for (const auto& kv : text::split_trimmed(body, ' ')) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= kv.size()) return false;
    }
    return true;
}

}  // namespace dpx
