#include "dpx/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Row construction. Table slicing is size-driven (max_chars = 300 in the
// pipeline default), so generated rows keep rendered lengths inside fixed
// windows: normal rows 70..100 chars always pack two to a slice, "spread"
// rows (the long pulse-test ones) 135..200 chars sit alone. That pins which
// rows share a retrieval chunk, which the planted-distractor scenarios rely
// on.
// ---------------------------------------------------------------------------

constexpr size_t kRowMin = 70, kRowMax = 100;
constexpr size_t kSpreadMin = 135, kSpreadMax = 200;

std::vector<std::string> make_row(const std::string& param, const std::string& symbol,
                                  const std::string& mn, const std::string& typ,
                                  const std::string& mx, const std::string& unit,
                                  std::string cond) {
    if (cond.empty()) cond = "TA 25 degC";
    std::vector<std::string> cells = {param, symbol, mn, typ, mx, unit, cond};
    static const char* kPads[] = {", see note 1", ", pulse width limited", ", guardbanded"};
    size_t pad = 0;
    while (render_table_row(cells).size() < kRowMin && pad < 3) {
        cells[6] += kPads[pad++];
    }
    size_t len = render_table_row(cells).size();
    if (len < kRowMin || len > kRowMax) {
        throw Error(text::format("generated row length %zu outside [%zu, %zu]: %s", len, kRowMin,
                                 kRowMax, render_table_row(cells).c_str()));
    }
    return cells;
}

std::vector<std::string> make_spread_row(const std::string& param, const std::string& symbol,
                                         const std::string& mn, const std::string& typ,
                                         const std::string& mx, const std::string& unit) {
    std::string cond =
        "Pulse test: pulse width less than or equal to 300 us, duty cycle less than or equal "
        "to 2.0 percent maximum, TA 25 degC";
    std::vector<std::string> cells = {param, symbol, mn, typ, mx, unit, cond};
    size_t len = render_table_row(cells).size();
    if (len < kSpreadMin || len > kSpreadMax) {
        throw Error(text::format("generated spread row length %zu outside [%zu, %zu]", len,
                                 kSpreadMin, kSpreadMax));
    }
    return cells;
}

std::string num(double v) {
    return text::format_number(v);
}

// Generated cell values must not tokenize to "10": the shared V_CE/V_GS =
// 10 V condition makes that token ubiquitous in queries, and a stray "10"
// in an unrelated cell would skew chunk ranking.
double sanitize(double v) {
    while (true) {
        bool collides = false;
        for (const auto& tok : text::lower_tokens(num(v))) {
            if (tok == "10") collides = true;
        }
        if (!collides) return v;
        v += 1.0;
    }
}

ParamTable ec_header() {
    ParamTable t;
    t.columns = {"Parameter", "Symbol", "Min", "Typ", "Max", "Unit", "Conditions"};
    return t;
}

ParamTable small_header() {
    ParamTable t;
    t.columns = {"Parameter", "Symbol", "Max", "Unit"};
    return t;
}

ParamTable span_header() {
    ParamTable t;
    t.columns = {"Parameter", "Symbol", "Min", "Max", "Unit"};
    return t;
}

std::vector<std::string> small_row(const std::string& param, const std::string& symbol,
                                   const std::string& mx, const std::string& unit) {
    return {param, symbol, mx, unit};
}

// What one ablation query for this document asks and expects.
struct CatPlan {
    std::string symbol;
    std::vector<Condition> conditions;   // what the query supplies
    std::string expected_cond_key;       // where the truth lives
    TruthValue truth;
};

struct DocPlan {
    std::string part, alias, manufacturer, keywords;
    DatasheetDoc doc;
    std::map<std::string, CatPlan> cats;  // E, R, P, S (A reuses E via the alias)
};

Condition make_condition(const std::string& name, double si_value, const std::string& unit,
                         const std::string& display) {
    return Condition{name, si_value, unit, display};
}

// Shared prose blocks.
Section general_description(const std::string& part, const std::string& alias,
                            const std::string& blurb) {
    Section s;
    s.heading = "General Description";
    s.body_text = "The " + part + " is " + blurb + ". Also available as " + alias +
                  " (lead-free packaging). The " + part +
                  " is characterized over the full operating temperature range.";
    return s;
}

Section amr_section(std::vector<std::vector<std::string>> rows) {
    Section s;
    s.heading = "Absolute Maximum Ratings";
    s.body_text = "Stresses exceeding the absolute maximum ratings may damage the device.";
    ParamTable t = small_header();
    t.rows = std::move(rows);
    s.tables.push_back(std::move(t));
    return s;
}

Section ec_section(std::vector<std::vector<std::string>> rows) {
    Section s;
    s.heading = "Electrical Characteristics";
    s.body_text = "Characteristics apply at TA 25 degC unless otherwise noted.";
    ParamTable t = ec_header();
    t.rows = std::move(rows);
    s.tables.push_back(std::move(t));
    return s;
}

Section tpc_section(std::vector<std::vector<std::string>> span_rows) {
    Section s;
    s.heading = "Typical Performance Curves";
    s.body_text =
        "Summary spans of the characterization sweeps across the operating temperature range.";
    if (!span_rows.empty()) {
        ParamTable t = span_header();
        t.rows = std::move(span_rows);
        s.tables.push_back(std::move(t));
    }
    return s;
}

Section thermal_section() {
    Section s;
    s.heading = "Thermal Characteristics";
    ParamTable t = small_header();
    t.rows.push_back(small_row("Thermal Resistance, Junction to Ambient", "R_thJA", "200",
                               "degC/W"));
    s.tables.push_back(std::move(t));
    return s;
}

Section package_section() {
    Section s;
    s.heading = "Package Information";
    s.body_text =
        "Consult the packaging drawing for physical dimensions and soldering guidance.";
    return s;
}

void finalize(DatasheetDoc& doc) {
    for (size_t i = 0; i < doc.sections.size(); ++i) {
        doc.sections[i].ordinal = static_cast<int>(i);
    }
}

struct FlankRoll {
    std::mt19937_64& rng;
    double rate;

    bool roll() { return static_cast<double>(rng() % 1000) / 1000.0 < rate; }
    std::string flank(double v) { return num(v); }
};

// ---------------------------------------------------------------------------
// Family templates. The planted structure per document:
//   - P symbol: truth row in EC, same-symbol decoy row (Max only) in AMR.
//   - R symbol: a long spread row plus condition rows c1..c5; the queried
//     condition row is last, and the numeric scaling of its cell differs
//     from the query rendering so only a refinement hint can bridge it.
//   - E symbol: one clean row.
//   - S symbol: queried by a SPICE-style name that appears only as the row's
//     Parameter text, plus an over-temperature span decoy in the curves
//     section.
// ---------------------------------------------------------------------------

DocPlan make_bjt(const std::string& part, const std::string& alias, const std::string& mfg,
                 bool pnp, int seq, FlankRoll& fr) {
    DocPlan plan;
    plan.part = part;
    plan.alias = alias;
    plan.manufacturer = mfg;
    plan.keywords = pnp ? "PNP, transistor, amplifier" : "NPN, transistor, amplifier";

    const double v_ceo_typ = sanitize(40 + 3 * seq);
    const double v_ceo_rating = sanitize(v_ceo_typ - 15);
    const double gain_lo = 40, gain_hi = sanitize(240 + 4 * seq);
    const double ft_typ = sanitize(250 + 7 * seq);  // MHz
    const double cob_typ = sanitize(6 + seq);       // pF
    const int micro_base = seq;                     // condition currents in uA
    const double gain_c[5] = {sanitize(60 + 2.0 * seq), sanitize(75 + 2.0 * seq),
                              sanitize(90 + 2.0 * seq), sanitize(105 + 2.0 * seq),
                              sanitize(120 + 2.0 * seq)};

    DatasheetDoc& doc = plan.doc;
    doc.meta.part_number = text::normalize_part(part);
    doc.meta.manufacturer = mfg;
    doc.meta.device_keywords = text::split_trimmed(plan.keywords, ',');
    doc.meta.aliases = {part, alias};
    doc.doc_id = text::to_lower(part);

    doc.sections.push_back(general_description(
        part, alias,
        pnp ? "a PNP silicon epitaxial transistor designed for general purpose amplifier "
              "and switching applications"
            : "an NPN silicon epitaxial transistor designed for general purpose amplifier "
              "and switching applications"));

    doc.sections.push_back(amr_section({
        small_row("Collector-Emitter Voltage", "V_CEO", num(v_ceo_rating), "Vdc"),
        small_row("Collector Current - Continuous", "I_C", "600", "mAdc"),
        small_row("Total Device Dissipation", "P_D", "625", "mW"),
        small_row("Junction Temperature", "T_J", "150", "degC"),
    }));

    auto cond_cell = [&](int k) {
        return text::format("I_C = %d uAdc, V_CE = 10 Vdc", 100 * k + micro_base);
    };
    bool flank_p = fr.roll();
    bool flank_e = fr.roll();
    bool flank_s = fr.roll();
    doc.sections.push_back(ec_section({
        make_row("Collector-Emitter Sustaining Voltage", "V_CEO",
                 flank_p ? num(sanitize(v_ceo_typ - 12)) : "-", num(v_ceo_typ),
                 flank_p ? num(sanitize(v_ceo_typ + 9)) : "-", "Vdc", ""),
        make_spread_row("DC Current Gain", "h_FE", num(gain_lo), "-", num(gain_hi), "-"),
        make_row("", "h_FE", "-", num(gain_c[0]), "-", "-", cond_cell(1)),
        make_row("Collector Cutoff Current", "I_CBO", "-", "-", "0.01", "uAdc",
                 "V_CB = 60 Vdc"),
        make_row("", "h_FE", "-", num(gain_c[1]), "-", "-", cond_cell(2)),
        make_row("Collector-Emitter Saturation Voltage", "V_CE(sat)", "-", "0.2", "0.4", "Vdc",
                 "I_C = 150 mAdc"),
        make_row("", "h_FE", "-", num(gain_c[2]), "-", "-", cond_cell(3)),
        make_row("Base-Emitter Saturation Voltage", "V_BE(sat)", "0.6", "-", "1.2", "Vdc",
                 "I_C = 150 mAdc"),
        make_row("", "h_FE", "-", num(gain_c[3]), "-", "-", cond_cell(4)),
        make_row("Transition Frequency", "f_T", flank_e ? num(sanitize(ft_typ - 50)) : "-",
                 num(ft_typ), flank_e ? num(sanitize(ft_typ + 40)) : "-", "MHz", ""),
        make_row("", "h_FE", "-", num(gain_c[4]), "-", "-", cond_cell(5)),
        make_row("Output Capacitance", "C_obo", flank_s ? num(sanitize(cob_typ - 1.5)) : "-",
                 num(cob_typ), flank_s ? num(sanitize(cob_typ + 2.5)) : "-", "pF", ""),
    }));

    doc.sections.push_back(tpc_section({
        {"Output Capacitance (over temperature)", "C_obo", num(sanitize(cob_typ * 0.7)),
         num(sanitize(cob_typ * 1.5)), "pF"},
    }));
    doc.sections.push_back(thermal_section());
    doc.sections.push_back(package_section());
    finalize(doc);

    // Query plans. The R query renders its current in base units so the raw
    // query shares no numeric token with the uAdc cell; the refinement hint
    // bridges them.
    double target_ua = 500 + micro_base;
    CatPlan r;
    r.symbol = "h_FE";
    r.conditions = {make_condition("I_C", target_ua * 1e-6, "A", num(target_ua * 1e-6) + " A"),
                    make_condition("V_CE", 10, "V", "10 V")};
    r.expected_cond_key = conditions_key(r.conditions);
    r.truth = {ParamValue::scalar(gain_c[4]), ""};
    plan.cats["R"] = r;

    plan.cats["E"] = CatPlan{"f_T", {}, "", {ParamValue::scalar(ft_typ * 1e6), "Hz"}};
    plan.cats["P"] = CatPlan{"V_CEO", {}, "", {ParamValue::scalar(v_ceo_typ), "V"}};
    plan.cats["S"] = CatPlan{"Cob", {}, "", {ParamValue::scalar(cob_typ * 1e-12), "F"}};
    return plan;
}

DocPlan make_nmos(const std::string& part, const std::string& alias, const std::string& mfg,
                  int seq, FlankRoll& fr) {
    DocPlan plan;
    plan.part = part;
    plan.alias = alias;
    plan.manufacturer = mfg;
    plan.keywords = "NMOS, MOSFET, small signal";

    const double id_typ = sanitize(100 + 5 * seq);  // mA
    const double id_rating = sanitize(id_typ + 60);
    const double rds_lo = 1.0, rds_hi = sanitize(11.0 + 0.5 * seq);
    const double ciss_typ = sanitize(20 + seq);      // pF
    const double vgsth_typ = sanitize(1.2 + 0.05 * seq);
    const int micro_base = seq;
    const double rds_c[5] = {sanitize(7.0 + 0.1 * seq), sanitize(6.4 + 0.1 * seq),
                             sanitize(5.8 + 0.1 * seq), sanitize(5.2 + 0.1 * seq),
                             sanitize(4.6 + 0.1 * seq)};

    DatasheetDoc& doc = plan.doc;
    doc.meta.part_number = text::normalize_part(part);
    doc.meta.manufacturer = mfg;
    doc.meta.device_keywords = text::split_trimmed(plan.keywords, ',');
    doc.meta.aliases = {part, alias};
    doc.doc_id = text::to_lower(part);

    doc.sections.push_back(general_description(
        part, alias, "an N-channel enhancement mode field effect transistor for small "
                     "signal switching applications"));

    doc.sections.push_back(amr_section({
        small_row("Drain Current - Continuous", "I_D", num(id_rating), "mAdc"),
        small_row("Gate-Source Voltage", "V_GS", "20", "Vdc"),
        small_row("Total Device Dissipation", "P_D", "350", "mW"),
        small_row("Junction Temperature", "T_J", "150", "degC"),
    }));

    auto cond_cell = [&](int k) {
        return text::format("V_GS = 10 Vdc, I_D = %d uAdc", 100 * k + micro_base);
    };
    bool flank_p = fr.roll();
    bool flank_e = fr.roll();
    bool flank_s = fr.roll();
    doc.sections.push_back(ec_section({
        make_row("On-State Drain Current", "I_D", flank_p ? num(sanitize(id_typ - 20)) : "-",
                 num(id_typ), flank_p ? num(sanitize(id_typ + 25)) : "-", "mAdc", ""),
        make_spread_row("Drain-Source On-Resistance", "R_DS(on)", num(rds_lo), "-", num(rds_hi),
                        "Ohm"),
        make_row("", "R_DS(on)", "-", num(rds_c[0]), "-", "Ohm", cond_cell(1)),
        make_row("Gate-Source Leakage Current", "I_GSS", "-", "-", "10", "nAdc",
                 "V_GS = 20 Vdc"),
        make_row("", "R_DS(on)", "-", num(rds_c[1]), "-", "Ohm", cond_cell(2)),
        make_row("Zero-Gate-Voltage Drain Current", "I_DSS", "-", "-", "1.0", "uAdc",
                 "V_DS = 48 Vdc"),
        make_row("", "R_DS(on)", "-", num(rds_c[2]), "-", "Ohm", cond_cell(3)),
        make_row("Forward Transconductance", "g_FS", "100", "-", "-", "mS", "I_D = 200 mAdc"),
        make_row("", "R_DS(on)", "-", num(rds_c[3]), "-", "Ohm", cond_cell(4)),
        make_row("Gate Threshold Voltage", "V_GS(th)", flank_s ? num(sanitize(vgsth_typ - 0.6)) : "-",
                 num(vgsth_typ), flank_s ? num(sanitize(vgsth_typ + 0.8)) : "-", "Vdc", ""),
        make_row("", "R_DS(on)", "-", num(rds_c[4]), "-", "Ohm", cond_cell(5)),
        make_row("Input Capacitance", "Ciss", flank_e ? num(sanitize(ciss_typ - 8)) : "-",
                 num(ciss_typ), flank_e ? num(sanitize(ciss_typ + 12)) : "-", "pF", ""),
    }));

    doc.sections.push_back(tpc_section({
        {"Gate Threshold Voltage (over temperature)", "V_GS(th)", num(sanitize(vgsth_typ - 0.8)),
         num(sanitize(vgsth_typ + 1.3)), "Vdc"},
    }));
    doc.sections.push_back(thermal_section());
    doc.sections.push_back(package_section());
    finalize(doc);

    double target_ua = 500 + micro_base;
    CatPlan r;
    r.symbol = "R_DS(on)";
    r.conditions = {make_condition("I_D", target_ua * 1e-6, "A", num(target_ua * 1e-6) + " A"),
                    make_condition("V_GS", 10, "V", "10 V")};
    r.expected_cond_key = conditions_key(r.conditions);
    r.truth = {ParamValue::scalar(rds_c[4]), "Ohm"};
    plan.cats["R"] = r;

    plan.cats["E"] = CatPlan{"Ciss", {}, "", {ParamValue::scalar(ciss_typ * 1e-12), "F"}};
    plan.cats["P"] = CatPlan{"I_D", {}, "", {ParamValue::scalar(id_typ * 1e-3), "A"}};
    plan.cats["S"] = CatPlan{"VTO", {}, "", {ParamValue::scalar(vgsth_typ), "V"}};
    return plan;
}

DocPlan make_diode(const std::string& part, const std::string& alias, const std::string& mfg,
                   bool led, int seq, FlankRoll& fr) {
    DocPlan plan;
    plan.part = part;
    plan.alias = alias;
    plan.manufacturer = mfg;
    plan.keywords = led ? "LED, indicator, lamp" : "diode, rectifier, switching";

    const double bv_typ = sanitize(led ? 5.0 + 0.5 * seq : 80 + 4 * seq);
    const double bv_rating = sanitize(bv_typ - std::max(2.0, bv_typ * 0.2));
    const double vf_typ = sanitize(led ? 1.8 + 0.05 * seq : 0.6 + 0.01 * seq);
    const double cj_typ = sanitize(3 + seq);  // pF

    DatasheetDoc& doc = plan.doc;
    doc.meta.part_number = text::normalize_part(part);
    doc.meta.manufacturer = mfg;
    doc.meta.device_keywords = text::split_trimmed(plan.keywords, ',');
    doc.meta.aliases = {part, alias};
    doc.doc_id = text::to_lower(part);

    doc.sections.push_back(general_description(
        part, alias,
        led ? "a high intensity light emitting diode indicator"
            : "a small signal fast switching diode"));

    const char* bv_symbol = led ? "V_R" : "BV";
    doc.sections.push_back(amr_section({
        small_row("Peak Repetitive Reverse Voltage", bv_symbol, num(bv_rating), "Vdc"),
        small_row("Forward Current - Continuous", "I_F", led ? "30" : "300", "mAdc"),
        small_row("Total Device Dissipation", "P_D", "250", "mW"),
        small_row("Junction Temperature", "T_J", "125", "degC"),
    }));

    bool flank_p = fr.roll();
    bool flank_e = fr.roll();
    bool flank_s = fr.roll();
    std::vector<std::vector<std::string>> rows = {
        make_row("Reverse Breakdown Voltage", bv_symbol, flank_p ? num(sanitize(bv_typ - 2)) : "-",
                 num(bv_typ), flank_p ? num(sanitize(bv_typ + 3)) : "-", "Vdc", ""),
        make_row("Forward Voltage", "V_F", flank_e ? num(sanitize(vf_typ - 0.2)) : "-",
                 num(vf_typ), flank_e ? num(sanitize(vf_typ + 0.4)) : "-", "Vdc",
                 "I_F = 20 mAdc"),
        make_row("Reverse Leakage Current", "I_R", "-", "-", "5.0", "uAdc", "V_R = 20 Vdc"),
        make_row("Junction Capacitance", "C_T", flank_s ? num(sanitize(cj_typ - 1)) : "-",
                 num(cj_typ), flank_s ? num(sanitize(cj_typ + 2)) : "-", "pF", ""),
    };
    if (led) {
        rows.push_back(make_row("Luminous Intensity", "I_V", "-", num(sanitize(40 + 5 * seq)),
                                "-", "mcd", "I_F = 20 mAdc"));
        rows.push_back(make_row("Peak Wavelength", "WL_P", "-", "640", "-", "nm", ""));
    }
    doc.sections.push_back(ec_section(std::move(rows)));

    doc.sections.push_back(tpc_section({
        {"Junction Capacitance (over temperature)", "C_T", num(sanitize(cj_typ * 0.6)),
         num(sanitize(cj_typ * 1.8)), "pF"},
    }));
    doc.sections.push_back(thermal_section());
    doc.sections.push_back(package_section());
    finalize(doc);

    std::vector<Condition> vf_conds = {make_condition("I_F", 0.02, "A", "20 mA")};
    CatPlan e;
    e.symbol = "V_F";
    e.conditions = {};
    e.expected_cond_key = conditions_key(vf_conds);
    e.truth = {ParamValue::scalar(vf_typ), "V"};
    plan.cats["E"] = e;
    plan.cats["P"] = CatPlan{bv_symbol, {}, "", {ParamValue::scalar(bv_typ), "V"}};
    return plan;
}

// ---------------------------------------------------------------------------
// The three named fixtures, fixed contents.
// ---------------------------------------------------------------------------

DocPlan make_p2n2222a() {
    DocPlan plan;
    plan.part = "P2N2222A";
    plan.alias = "P2N2222AG";
    plan.manufacturer = "ON Semiconductor";
    plan.keywords = "NPN, transistor, general purpose";

    DatasheetDoc& doc = plan.doc;
    doc.meta.part_number = "P2N2222A";
    doc.meta.series = "P2N22";
    doc.meta.manufacturer = plan.manufacturer;
    doc.meta.device_keywords = {"NPN", "transistor", "general purpose"};
    doc.meta.aliases = {"P2N2222A", "P2N2222AG"};
    doc.doc_id = "p2n2222a";

    doc.sections.push_back(general_description(
        "P2N2222A", "P2N2222AG",
        "an NPN silicon epitaxial transistor designed for general purpose amplifier and "
        "switching applications"));

    doc.sections.push_back(amr_section({
        small_row("Collector-Emitter Voltage", "V_CEO", "40", "Vdc"),
        small_row("Collector-Base Voltage", "V_CBO", "75", "Vdc"),
        small_row("Collector Current - Continuous", "I_C", "600", "mAdc"),
        small_row("Total Device Dissipation", "P_D", "625", "mW"),
    }));

    doc.sections.push_back(ec_section({
        make_row("Collector-Emitter Sustaining Voltage", "V_CEO", "40", "52", "61", "Vdc", ""),
        make_spread_row("DC Current Gain", "h_FE", "40", "-", "300", "-"),
        make_row("", "h_FE", "-", "50", "-", "-", "I_C = 100 uAdc, V_CE = 10 Vdc"),
        make_row("Collector Cutoff Current", "I_CBO", "-", "-", "0.01", "uAdc",
                 "V_CB = 60 Vdc"),
        make_row("", "h_FE", "-", "75", "-", "-", "I_C = 1.0 mAdc, V_CE = 10 Vdc"),
        make_row("Collector-Emitter Saturation Voltage", "V_CE(sat)", "-", "0.2", "0.4", "Vdc",
                 "I_C = 150 mAdc"),
        make_row("", "h_FE", "-", "100", "-", "-", "I_C = 10 mAdc, V_CE = 10 Vdc"),
        make_row("Base-Emitter Saturation Voltage", "V_BE(sat)", "0.6", "-", "1.2", "Vdc",
                 "I_C = 150 mAdc"),
        make_row("", "h_FE", "-", "120", "-", "-", "I_C = 150 mAdc, V_CE = 10 Vdc"),
        make_row("Transition Frequency", "f_T", "250", "300", "340", "MHz", ""),
        make_row("", "h_FE", "-", "90", "-", "-", "I_C = 501 uAdc, V_CE = 10 Vdc"),
        make_row("Output Capacitance", "C_obo", "6.5", "8.0", "11", "pF", ""),
    }));

    doc.sections.push_back(tpc_section({
        {"Output Capacitance (over temperature)", "C_obo", "5.6", "12", "pF"},
    }));
    doc.sections.push_back(thermal_section());
    doc.sections.push_back(package_section());
    finalize(doc);

    CatPlan r;
    r.symbol = "h_FE";
    r.conditions = {make_condition("I_C", 501e-6, "A", "0.000501 A"),
                    make_condition("V_CE", 10, "V", "10 V")};
    r.expected_cond_key = conditions_key(r.conditions);
    r.truth = {ParamValue::scalar(90), ""};
    plan.cats["R"] = r;
    plan.cats["E"] = CatPlan{"f_T", {}, "", {ParamValue::scalar(300e6), "Hz"}};
    plan.cats["P"] = CatPlan{"V_CEO", {}, "", {ParamValue::scalar(52), "V"}};
    plan.cats["S"] = CatPlan{"Cob", {}, "", {ParamValue::scalar(8.0e-12), "F"}};
    return plan;
}

DocPlan make_2n7002e() {
    DocPlan plan;
    plan.part = "2N7002E";
    plan.alias = "2N7002EG";
    plan.manufacturer = "ON Semiconductor";
    plan.keywords = "NMOS, MOSFET, small signal";

    DatasheetDoc& doc = plan.doc;
    doc.meta.part_number = "2N7002E";
    doc.meta.manufacturer = plan.manufacturer;
    doc.meta.device_keywords = {"NMOS", "MOSFET", "small signal"};
    doc.meta.aliases = {"2N7002E", "2N7002EG"};
    doc.doc_id = "2n7002e";

    doc.sections.push_back(general_description(
        "2N7002E", "2N7002EG",
        "an N-channel enhancement mode field effect transistor for small signal switching "
        "applications"));

    doc.sections.push_back(amr_section({
        small_row("Drain-Source Voltage", "V_DS", "60", "Vdc"),
        small_row("Gate-Source Voltage", "V_GS", "20", "Vdc"),
        small_row("Drain Current - Continuous", "I_D", "230", "mAdc"),
        small_row("Total Device Dissipation", "P_D", "350", "mW"),
    }));

    doc.sections.push_back(ec_section({
        make_row("Gate Threshold Voltage", "VTO", "1.0", "1.6", "2.4", "Vdc", ""),
        make_spread_row("Drain-Source On-Resistance", "R_DS(on)", "1.0", "-", "13.5", "Ohm"),
        make_row("", "R_DS(on)", "-", "7.0", "-", "Ohm", "V_GS = 10 Vdc, I_D = 102 uAdc"),
        make_row("Gate-Source Leakage Current", "I_GSS", "-", "-", "10", "nAdc",
                 "V_GS = 20 Vdc"),
        make_row("", "R_DS(on)", "-", "6.4", "-", "Ohm", "V_GS = 10 Vdc, I_D = 202 uAdc"),
        make_row("Zero-Gate-Voltage Drain Current", "I_DSS", "-", "-", "1.0", "uAdc",
                 "V_DS = 48 Vdc"),
        make_row("", "R_DS(on)", "-", "5.8", "-", "Ohm", "V_GS = 10 Vdc, I_D = 302 uAdc"),
        make_row("Conductance Parameter", "BETA", "-", "0.12", "-", "A/V2", ""),
        make_row("", "R_DS(on)", "-", "5.2", "-", "Ohm", "V_GS = 10 Vdc, I_D = 402 uAdc"),
        make_row("On-State Drain Current", "I_D", "75", "115", "140", "mAdc", ""),
        make_row("", "R_DS(on)", "-", "4.6", "-", "Ohm", "V_GS = 10 Vdc, I_D = 502 uAdc"),
        make_row("Input Capacitance", "Ciss", "18", "25", "33", "pF", ""),
    }));

    doc.sections.push_back(tpc_section({
        {"Gate Threshold Voltage (over temperature)", "V_GS(th)", "0.8", "2.9", "Vdc"},
    }));
    doc.sections.push_back(thermal_section());
    doc.sections.push_back(package_section());
    finalize(doc);

    CatPlan r;
    r.symbol = "R_DS(on)";
    r.conditions = {make_condition("I_D", 502e-6, "A", "0.000502 A"),
                    make_condition("V_GS", 10, "V", "10 V")};
    r.expected_cond_key = conditions_key(r.conditions);
    r.truth = {ParamValue::scalar(4.6), "Ohm"};
    plan.cats["R"] = r;
    plan.cats["E"] = CatPlan{"VTO", {}, "", {ParamValue::scalar(1.6), "V"}};
    plan.cats["P"] = CatPlan{"I_D", {}, "", {ParamValue::scalar(0.115), "A"}};
    return plan;
}

DocPlan make_5100h5() {
    DocPlan plan;
    plan.part = "5100H5";
    plan.alias = "5100H5G";
    plan.manufacturer = "Vishay";
    plan.keywords = "LED, indicator, lamp";

    DatasheetDoc& doc = plan.doc;
    doc.meta.part_number = "5100H5";
    doc.meta.manufacturer = plan.manufacturer;
    doc.meta.device_keywords = {"LED", "indicator", "lamp"};
    doc.meta.aliases = {"5100H5", "5100H5G"};
    doc.doc_id = "5100h5";

    doc.sections.push_back(general_description(
        "5100H5", "5100H5G", "a high intensity light emitting diode indicator"));

    doc.sections.push_back(amr_section({
        small_row("Reverse Voltage", "V_R", "5.0", "Vdc"),
        small_row("Forward Current - Continuous", "I_F", "30", "mAdc"),
        small_row("Total Device Dissipation", "P_D", "120", "mW"),
        small_row("Junction Temperature", "T_J", "100", "degC"),
    }));

    doc.sections.push_back(ec_section({
        make_row("Forward Voltage", "V_F", "2.8", "3.2", "3.8", "Vdc", "I_F = 20 mAdc"),
        make_row("Reverse Breakdown Voltage", "BV", "5.0", "-", "-", "Vdc", "I_R = 100 uAdc"),
        make_row("Luminous Intensity", "I_V", "80", "120", "160", "mcd", "I_F = 20 mAdc"),
        make_row("Peak Wavelength", "WL_P", "-", "640", "-", "nm", ""),
    }));

    doc.sections.push_back(tpc_section({
        {"Luminous Intensity (over temperature)", "I_V(T)", "60", "200", "mcd"},
    }));
    doc.sections.push_back(thermal_section());
    doc.sections.push_back(package_section());
    finalize(doc);

    std::vector<Condition> vf_conds = {make_condition("I_F", 0.02, "A", "20 mA")};
    CatPlan e;
    e.symbol = "V_F";
    e.expected_cond_key = conditions_key(vf_conds);
    e.truth = {ParamValue::scalar(3.2), "V"};
    plan.cats["E"] = e;
    return plan;
}

}  // namespace

SynthCorpus gen_synthetic_corpus(const SynthOptions& options) {
    if (options.n_docs < 5) throw Error("synthetic corpus needs at least 5 documents");
    std::mt19937_64 rng(options.seed);
    FlankRoll fr{rng, options.distractor_rate};

    static const char* kManufacturers[] = {"ON Semiconductor", "Texas Instruments", "Fairchild",
                                           "NXP",              "Vishay",            "Rohm"};

    std::vector<DocPlan> plans;
    plans.push_back(make_p2n2222a());
    plans.push_back(make_2n7002e());
    plans.push_back(make_5100h5());

    for (int i = 0; i < options.n_docs; ++i) {
        int fam = i % 5;
        int k = i / 5;
        int seq = i + 1;
        std::string mfg = kManufacturers[i % 6];
        std::string part, alias;
        DocPlan plan;
        switch (fam) {
            case 0:
                part = text::format("2N39%02dA", k);
                plan = make_bjt(part, part + "G", mfg, false, seq, fr);
                break;
            case 1:
                part = text::format("2N29%02dA", k);
                plan = make_bjt(part, part + "G", mfg, true, seq, fr);
                break;
            case 2:
                part = text::format("2N70%02dK", k);
                plan = make_nmos(part, part + "G", mfg, seq, fr);
                break;
            case 3:
                part = text::format("1N48%02d", k);
                plan = make_diode(part, part + "G", mfg, false, seq, fr);
                break;
            default:
                part = text::format("LH51%02dH", k);
                plan = make_diode(part, part + "G", mfg, true, seq, fr);
                break;
        }
        plans.push_back(std::move(plan));
    }

    SynthCorpus corpus;
    for (const auto& plan : plans) {
        corpus.files.emplace_back(plan.doc.doc_id + ".dst", render_document(plan.doc));
        for (const auto& [cat, spec] : plan.cats) {
            corpus.truth.entries[GroundTruth::key(plan.doc.doc_id, spec.symbol,
                                                  spec.expected_cond_key)] = spec.truth;
        }
    }

    // Query schedule: 40% plain lookups, 30% condition refinements, 10%
    // rating-decoy targets, 10% SPICE-name synonyms, 10% alias lookups.
    static const char* kPattern[] = {"E", "R", "E", "A", "R", "P", "E", "R", "S", "E"};
    int n_queries = options.n_queries > 0 ? options.n_queries
                                          : 2 * static_cast<int>(plans.size());
    std::map<std::string, size_t> next_doc;  // per category rotation
    int emitted = 0;
    int qid = 0;
    while (emitted < n_queries) {
        const std::string cat = kPattern[qid % 10];
        ++qid;
        // Find the next plan supporting this category.
        size_t& cursor = next_doc[cat];
        const std::string lookup = (cat == "A") ? "E" : cat;
        DocPlan* chosen = nullptr;
        for (size_t step = 0; step < plans.size(); ++step) {
            DocPlan& p = plans[(cursor + step) % plans.size()];
            if (p.cats.count(lookup)) {
                chosen = &p;
                cursor = (cursor + step + 1) % plans.size();
                break;
            }
        }
        if (!chosen) continue;
        const CatPlan& spec = chosen->cats.at(lookup);
        EvalQuery q;
        q.id = text::format("q%03d-%s-%s", emitted, cat.c_str(), chosen->doc.doc_id.c_str());
        q.part = (cat == "A") ? chosen->alias : chosen->part;
        q.doc_id = chosen->doc.doc_id;
        q.symbols = {spec.symbol};
        q.conditions = spec.conditions;
        q.expected_cond_key[spec.symbol] = spec.expected_cond_key;
        q.category = cat;
        corpus.queries.push_back(std::move(q));
        ++emitted;
    }
    return corpus;
}

CorpusIndex SynthCorpus::build_index() const {
    std::vector<DatasheetDoc> docs;
    for (const auto& [name, content] : files) {
        if (name.rfind("_", 0) == 0) continue;
        docs.push_back(ingest_document(content, name));
    }
    return dpx::build_index(docs);
}

std::string truth_to_json(const GroundTruth& truth) {
    nlohmann::json j;
    for (const auto& [key, value] : truth.entries) {
        j[key] = {{"lo", value.value.lo},
                  {"hi", value.value.hi},
                  {"range", value.value.is_range},
                  {"unit", value.unit}};
    }
    return j.dump(2);
}

GroundTruth truth_from_json(const std::string& json_text) {
    GroundTruth truth;
    auto j = nlohmann::json::parse(json_text);
    for (auto it = j.begin(); it != j.end(); ++it) {
        TruthValue v;
        v.value.lo = it.value().at("lo");
        v.value.hi = it.value().at("hi");
        v.value.is_range = it.value().at("range");
        v.unit = it.value().at("unit");
        truth.entries[it.key()] = v;
    }
    return truth;
}

std::string queries_to_json(const std::vector<EvalQuery>& queries) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& q : queries) {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& c : q.conditions) {
            conds.push_back(
                {{"name", c.name}, {"value", c.value}, {"unit", c.unit}, {"display", c.display}});
        }
        j.push_back({{"id", q.id},
                     {"part", q.part},
                     {"doc_id", q.doc_id},
                     {"symbols", q.symbols},
                     {"conditions", conds},
                     {"expected", q.expected_cond_key},
                     {"category", q.category}});
    }
    return j.dump(2);
}

std::vector<EvalQuery> queries_from_json(const std::string& json_text) {
    std::vector<EvalQuery> out;
    auto j = nlohmann::json::parse(json_text);
    for (const auto& item : j) {
        EvalQuery q;
        q.id = item.at("id");
        q.part = item.at("part");
        q.doc_id = item.at("doc_id");
        q.symbols = item.at("symbols").get<std::vector<std::string>>();
        for (const auto& c : item.at("conditions")) {
            q.conditions.push_back(Condition{c.at("name"), c.at("value"), c.at("unit"),
                                             c.at("display")});
        }
        q.expected_cond_key =
            item.at("expected").get<std::map<std::string, std::string>>();
        q.category = item.at("category");
        out.push_back(std::move(q));
    }
    return out;
}

void write_corpus(const SynthCorpus& corpus, const std::string& directory) {
    fs::create_directories(directory);
    for (const auto& [name, content] : corpus.files) {
        std::ofstream out(fs::path(directory) / name, std::ios::binary);
        out << content;
    }
    std::ofstream(fs::path(directory) / "_truth.json", std::ios::binary)
        << truth_to_json(corpus.truth);
    std::ofstream(fs::path(directory) / "_queries.json", std::ios::binary)
        << queries_to_json(corpus.queries);
}

SynthCorpus load_corpus(const std::string& directory) {
    SynthCorpus corpus;
    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::vector<fs::path> dst_files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.path().extension() == ".dst") dst_files.push_back(entry.path());
    }
    std::sort(dst_files.begin(), dst_files.end());
    for (const auto& p : dst_files) {
        corpus.files.emplace_back(p.filename().string(), read_file(p));
    }
    fs::path truth_path = fs::path(directory) / "_truth.json";
    fs::path queries_path = fs::path(directory) / "_queries.json";
    if (fs::exists(truth_path)) corpus.truth = truth_from_json(read_file(truth_path));
    if (fs::exists(queries_path)) corpus.queries = queries_from_json(read_file(queries_path));
    return corpus;
}

}  // namespace dpx
