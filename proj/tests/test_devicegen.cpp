#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpx/devicegen.hpp"
#include "dpx/errors.hpp"
#include "dpx/synth.hpp"
#include "dpx/text.hpp"

using namespace dpx;

namespace {

CorpusIndex fixture_index() {
    static CorpusIndex index = [] {
        SynthCorpus corpus = gen_synthetic_corpus({});
        return corpus.build_index();
    }();
    return index;
}

ParamEntry scalar_entry(const std::string& symbol, double value, const std::string& unit = "") {
    ParamEntry e;
    e.symbol = symbol;
    e.value = ParamValue::scalar(value);
    e.unit = unit;
    return e;
}

}  // namespace

TEST_CASE("classification from metadata keywords") {
    CorpusIndex index = fixture_index();
    DeviceClass npn = classify_device(*index.find("p2n2222a"));
    CHECK(npn.family == DeviceFamily::BJT_NPN);
    CHECK(npn.kind == DeviceKind::Dynamic);

    DeviceClass led = classify_device(*index.find("5100h5"));
    CHECK(led.family == DeviceFamily::LED);
    CHECK(led.kind == DeviceKind::Static);

    DeviceClass nmos = classify_device(*index.find("2n7002e"));
    CHECK(nmos.family == DeviceFamily::NMOS);
    CHECK(nmos.kind == DeviceKind::Dynamic);
}

TEST_CASE("classification falls back to section text, else Unknown") {
    DatasheetDoc doc;
    doc.doc_id = "mystery";
    doc.meta.part_number = "M1";
    Section s;
    s.heading = "Overview";
    s.body_text = "A silicon pnp epitaxial device.";
    s.ordinal = 0;
    doc.sections.push_back(s);
    CHECK(classify_device(doc).family == DeviceFamily::BJT_PNP);

    doc.sections[0].body_text = "No family words here at all.";
    CHECK(classify_device(doc).family == DeviceFamily::Unknown);
}

TEST_CASE("keyword precedence is stable: NPN outranks DIODE in mixed text") {
    DatasheetDoc doc;
    doc.doc_id = "mixed";
    doc.meta.part_number = "M2";
    doc.meta.device_keywords = {"diode-protected NPN output"};
    Section s;
    s.heading = "Overview";
    s.body_text = "Integrated diode plus NPN transistor.";
    s.ordinal = 0;
    doc.sections.push_back(s);
    DeviceClass cls = classify_device(doc);
    CHECK(cls.family == DeviceFamily::BJT_NPN);
    // substring guards: PNP inside another word does not count
    DatasheetDoc doc2 = doc;
    doc2.meta.device_keywords = {"SNPNX"};
    doc2.sections[0].body_text = "led array";  // LED by whole word
    CHECK(classify_device(doc2).family == DeviceFamily::LED);
}

TEST_CASE("Ohm's law derivation") {
    ParamEntry rs = derive_rs_ohms_law({1.0, "V"}, {0.5, "A"});
    CHECK(rs.value.lo == doctest::Approx(2.0));
    CHECK(rs.unit == "Ohm");
    CHECK(rs.derived);
    CHECK(rs.derived_formula == "ohms_law(V_F/I_F)");
    CHECK(rs.confidence == Confidence::Derived);

    // the 5100H5 planted row: V_F typ 3.2 V at I_F 20 mA
    ParamEntry fixture_rs = derive_rs_ohms_law({3.2, "V"}, {0.02, "A"});
    CHECK(fixture_rs.value.lo == doctest::Approx(160.0));

    CHECK_THROWS_AS(derive_rs_ohms_law({1.0, "V"}, {0.0, "A"}), ZeroCurrent);
}

TEST_CASE("NPN card maps h_FE to BF") {
    ParameterSet params;
    params.merge(scalar_entry("h_FE", 200));
    SpiceModel model = generate_model_card(params, DeviceFamily::BJT_NPN, "P2N2222A");
    CHECK(model.rendered_card.rfind(".model P2N2222A NPN (", 0) == 0);
    CHECK(model.rendered_card.find("BF=200") != std::string::npos);
    CHECK(card_is_well_formed(model.rendered_card));
}

TEST_CASE("NMOS card carries VTO, KP, CGS from the 2n7002e values") {
    ParameterSet params;
    params.merge(scalar_entry("VTO", 1.6, "V"));
    params.merge(scalar_entry("BETA", 0.12, "A/V2"));
    params.merge(scalar_entry("Ciss", 25e-12, "F"));
    SpiceModel model = generate_model_card(params, DeviceFamily::NMOS, "2N7002E");
    CHECK(model.rendered_card.find("NMOS") != std::string::npos);
    CHECK(model.rendered_card.find("VTO=1.6") != std::string::npos);
    CHECK(model.rendered_card.find("KP=0.12") != std::string::npos);
    CHECK(model.rendered_card.find("CGS=2.5e-11") != std::string::npos);
    CHECK(card_is_well_formed(model.rendered_card));
}

TEST_CASE("diode without RS or BV is rejected; unknown family is rejected") {
    ParameterSet params;
    params.merge(scalar_entry("V_F", 3.2, "V"));
    try {
        generate_model_card(params, DeviceFamily::Diode, "5100H5");
        FAIL("expected MissingRequiredParameter");
    } catch (const MissingRequiredParameter& e) {
        CHECK(e.symbol == "RS");
    }
    CHECK_THROWS_AS(generate_model_card(params, DeviceFamily::Unknown, "X"), UnknownFamily);
}

TEST_CASE("ranges collapse to the midpoint on the card") {
    ParameterSet params;
    ParamEntry gain;
    gain.symbol = "h_FE";
    gain.value = ParamValue::range(40, 300);
    gain.confidence = Confidence::FallbackMinMax;
    params.merge(gain);
    SpiceModel model = generate_model_card(params, DeviceFamily::BJT_NPN, "P2N2222A");
    CHECK(model.rendered_card.find("BF=170") != std::string::npos);
    CHECK(model.rendered_card.find("* BF from range midpoint 40..300") != std::string::npos);
}

TEST_CASE("unmapped symbols surface in a trailing comment, not the card") {
    ParameterSet params;
    params.merge(scalar_entry("h_FE", 180));
    params.merge(scalar_entry("f_T", 3e8, "Hz"));
    SpiceModel model = generate_model_card(params, DeviceFamily::BJT_NPN, "P2N2222A");
    std::string first_line = model.rendered_card.substr(0, model.rendered_card.find('\n'));
    CHECK(first_line.find("f_T") == std::string::npos);
    CHECK(model.rendered_card.find("* unmapped: f_T=3e+08") != std::string::npos);
    CHECK(card_is_well_formed(model.rendered_card));
}

TEST_CASE("mapping overrides change the card key") {
    MappingTable mapping = MappingTable::defaults();
    mapping.symbol_to_key["Ciss"] = "CGDO";
    ParameterSet params;
    params.merge(scalar_entry("VTO", 2.0, "V"));
    params.merge(scalar_entry("Ciss", 1e-11, "F"));
    SpiceModel model = generate_model_card(params, DeviceFamily::NMOS, "X", mapping);
    CHECK(model.rendered_card.find("CGDO=1e-11") != std::string::npos);
}

TEST_CASE("card values render with six significant digits, traceably") {
    ParameterSet params;
    params.merge(scalar_entry("VTO", 1.6547821, "V"));
    SpiceModel model = generate_model_card(params, DeviceFamily::NMOS, "X");
    REQUIRE(model.card_params.size() == 1);
    CHECK(model.card_params[0].second == text::format_number(1.6547821));
    CHECK(model.card_params[0].second == "1.65478");
}

TEST_CASE("scripts are deterministic and reference the model") {
    ParameterSet params;
    params.merge(scalar_entry("h_FE", 200));
    SpiceModel model = generate_model_card(params, DeviceFamily::BJT_NPN, "P2N2222A");
    std::string s1 = generate_sim_script(model);
    std::string s2 = generate_sim_script(model);
    CHECK(s1 == s2);  // byte-identical
    CHECK(s1.find("P2N2222A") != std::string::npos);
    CHECK(s1.find("BF=200") != std::string::npos);
    CHECK(s1.find("circuit.BJT") != std::string::npos);
    CHECK(s1.find("from PySpice.Spice.Netlist import Circuit") != std::string::npos);
}

TEST_CASE("diode script from the 5100H5 values carries the derived RS") {
    ParameterSet params;
    ParamEntry rs = derive_rs_ohms_law({3.2, "V"}, {0.02, "A"});
    params.merge(rs);
    params.merge(scalar_entry("BV", 5, "V"));
    SpiceModel model = generate_model_card(params, DeviceFamily::LED, "5100H5");
    CHECK(model.rendered_card.find(" D (") != std::string::npos);
    CHECK(model.rendered_script.find("RS=160") != std::string::npos);
    CHECK(model.rendered_script.find("circuit.Diode") != std::string::npos);
}

TEST_CASE("card grammar check rejects malformed cards") {
    CHECK(card_is_well_formed(".model X NPN (BF=200 VAF=100)"));
    CHECK(card_is_well_formed(".model X D ()"));
    CHECK_FALSE(card_is_well_formed("model X NPN (BF=200)"));
    CHECK_FALSE(card_is_well_formed(".model X NPN BF=200)"));
    CHECK_FALSE(card_is_well_formed(".model X NPN (BF 200)"));
    CHECK_FALSE(card_is_well_formed(".model X Y NPN (A=1)"));
}
