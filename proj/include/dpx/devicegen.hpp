#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpx/corpus.hpp"
#include "dpx/params.hpp"

namespace dpx {

enum class DeviceKind { Static, Dynamic };
enum class DeviceFamily { BJT_NPN, BJT_PNP, NMOS, PMOS, Diode, LED, Unknown };

struct DeviceClass {
    DeviceKind kind = DeviceKind::Static;
    DeviceFamily family = DeviceFamily::Unknown;

    bool operator==(const DeviceClass&) const = default;
};

std::string to_string(DeviceFamily family);
std::string to_string(DeviceKind kind);

// First family keyword found, scanning metadata keywords then section
// headings and bodies, in precedence order NPN, PNP, NMOS, PMOS, LED, DIODE.
DeviceClass classify_device(const DatasheetDoc& doc);

// RS = V_F / I_F, in ohms, flagged as a derived value.
ParamEntry derive_rs_ohms_law(const units::Quantity& v_f, const units::Quantity& i_f);

// Extracted-symbol -> SPICE card key mapping; user-extendable via config.
struct MappingTable {
    std::map<std::string, std::string> symbol_to_key;

    static MappingTable defaults();
};

struct SpiceModel {
    std::string name;
    DeviceFamily family = DeviceFamily::Unknown;
    std::vector<std::pair<std::string, std::string>> card_params;  // ordered (key, value)
    std::string rendered_card;    // ".model <name> <TYPE> (...)"
    std::string rendered_script;  // PySpice-format script text
};

// Render a .model card from the extracted parameters. Ranges collapse to
// their midpoint. Required symbols per family: BJT h_FE; MOS VTO; diode/LED
// at least one of RS, BV.
SpiceModel generate_model_card(const ParameterSet& params, DeviceFamily family,
                               const std::string& name, const MappingTable& mapping =
                                   MappingTable::defaults());

// Self-contained PySpice-format script: circuit construction, the model
// card, one element referencing it. Text artifact only, never executed.
std::string generate_sim_script(const SpiceModel& model);

// Minimal .model grammar check used by tests and the CLI: name, type token,
// balanced parentheses, key=value pairs.
bool card_is_well_formed(const std::string& card);

}  // namespace dpx
