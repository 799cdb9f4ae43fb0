#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include <httplib.h>

#include "dpx/backend.hpp"
#include "dpx/errors.hpp"
#include "dpx/synth.hpp"
#include "dpx/text.hpp"

using namespace dpx;

namespace {

Chunk table_chunk(const std::string& doc_id, const std::string& rows, int idx = 0) {
    Chunk c;
    c.doc_id = doc_id;
    c.section_ordinal = 2;
    c.chunk_index = idx;
    c.text = "| Parameter | Symbol | Min | Typ | Max | Unit | Conditions |\n" + rows;
    TableSlice slice;
    slice.columns = {"Parameter", "Symbol", "Min", "Typ", "Max", "Unit", "Conditions"};
    c.table_slice = slice;
    return c;
}

ExtractionRequest request(const std::string& part, std::vector<std::string> symbols,
                          const std::string& conditions = "") {
    ExtractionRequest req;
    req.part_number = part;
    req.requested_symbols = std::move(symbols);
    req.conditions = parse_conditions(conditions);
    return req;
}

}  // namespace

TEST_CASE("canned mock replays responses in order and repeats the last") {
    MockScript script;
    script.mode = MockMode::Canned;
    script.canned = {"A", "B"};
    MockBackend backend(script);
    ChatRequest req{"sys", "user", 64, 0.0};
    CHECK(backend.complete(req).text == "A");
    CHECK(backend.complete(req).text == "B");
    CHECK(backend.complete(req).text == "B");
    CHECK(backend.calls() == 3);
}

TEST_CASE("a canned mock without responses is a configuration error") {
    MockScript script;
    script.mode = MockMode::Canned;
    MockBackend backend(script);
    CHECK_THROWS_AS(backend.complete({"s", "u", 8, 0.0}), BackendError);
}

TEST_CASE("mock latency is at least the injected delay") {
    MockScript script;
    script.mode = MockMode::Canned;
    script.canned = {"X"};
    script.inject_delay_ms = 25.0;
    MockBackend backend(script);
    CompletionResult result = backend.complete({"s", "u", 64, 0.0});
    CHECK(result.latency_ms >= 25.0);
}

TEST_CASE("prompt embeds symbols, conditions verbatim, and chunk provenance") {
    auto chunk = table_chunk("2n7002e", "| Gate Threshold Voltage | VTO | 1.0 | 1.6 | 2.4 | V | - |");
    auto req = request("2N7002E", {"VTO"}, "I_C=0.1 mA, V_CE=10 V");
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    const std::string& user = built.request.user_prompt;
    CHECK(user.find("Part: 2N7002E") != std::string::npos);
    CHECK(user.find("Symbols: VTO") != std::string::npos);
    CHECK(user.find("I_C=0.1 mA") != std::string::npos);
    CHECK(user.find("V_CE=10 V") != std::string::npos);
    CHECK(user.find("--- chunk doc=2n7002e section=2 idx=0 ---") != std::string::npos);
    CHECK(user.find("| VTO |") != std::string::npos);
    // system prompt instructs the Typ-column reading
    CHECK(built.request.system_prompt.find("Typ") != std::string::npos);
    CHECK(built.request.system_prompt.find("ANSWER:") != std::string::npos);
    CHECK(built.dropped_chunks == 0);
}

TEST_CASE("over-budget prompts drop the lowest-scored chunks, never all") {
    std::vector<Chunk> chunks;
    for (int i = 0; i < 50; ++i) {
        chunks.push_back(table_chunk("d", "| Some Parameter | S" + std::to_string(i) +
                                              " | 1 | 2 | 3 | V | - |", i));
    }
    auto req = request("D1", {"S0"});
    PromptBuild built = build_extraction_prompt(chunks, req, PromptStage::Initial, 2000);
    CHECK(built.dropped_chunks > 0);
    CHECK(built.dropped_chunks < 50);
    CHECK(built.request.user_prompt.find("S0") != std::string::npos);  // best chunk kept
    // a budget too small even for one chunk is an error
    CHECK_THROWS_AS(build_extraction_prompt(chunks, req, PromptStage::Initial, 100),
                    PromptTooLong);
}

TEST_CASE("rule mock prefers the Typ column over Min/Max") {
    auto chunk = table_chunk("2n7002e", "| Gate Threshold Voltage | VTO | 1.0 | 1.6 | 2.4 | V | - |");
    auto req = request("2N7002E", {"VTO"});
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    std::string out = mock_rule_complete(built.request);
    ParameterSet params = parse_extraction_output(out);
    const ParamEntry* vto = params.find("VTO", "");
    REQUIRE(vto != nullptr);
    CHECK(vto->value.lo == doctest::Approx(1.6));
    CHECK(vto->unit == "V");
    CHECK(vto->confidence == Confidence::TypPreferred);
}

TEST_CASE("rule mock reports the min-max span when rows stay ambiguous") {
    auto chunk = table_chunk(
        "p2n2222a",
        "| DC Current Gain | h_FE | 40 | - | 300 | - | - |\n"
        "|  | h_FE | - | 75 | - | - | I_C = 1.0 mAdc, V_CE = 10 Vdc |");
    auto req = request("P2N2222A", {"h_FE"});
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    ParameterSet params = parse_extraction_output(mock_rule_complete(built.request));
    const ParamEntry* gain = params.find("h_FE", "");
    REQUIRE(gain != nullptr);
    CHECK(gain->value.is_range);
    CHECK(gain->value.lo == doctest::Approx(40));
    CHECK(gain->value.hi == doctest::Approx(300));
}

TEST_CASE("rule mock selects the condition-matching row") {
    auto chunk = table_chunk(
        "p2n2222a",
        "| DC Current Gain | h_FE | 40 | - | 300 | - | - |\n"
        "|  | h_FE | - | 50 | - | - | I_C = 100 uAdc, V_CE = 10 Vdc |");
    auto req = request("P2N2222A", {"h_FE"}, "I_C=0.1 mA, V_CE=10 V");
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    ParameterSet params = parse_extraction_output(mock_rule_complete(built.request));
    const ParamEntry* gain = params.find("h_FE", conditions_key(req.conditions));
    REQUIRE(gain != nullptr);
    CHECK(gain->value.lo == doctest::Approx(50));
    CHECK(gain->confidence == Confidence::Exact);
}

TEST_CASE("rule mock emits ? for symbols absent from every excerpt") {
    auto chunk = table_chunk("d1", "| Forward Voltage | V_F | - | 3.2 | - | V | - |");
    auto req = request("D1", {"BV"});
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    std::string out = mock_rule_complete(built.request);
    CHECK(out.find("BV=?") != std::string::npos);
    CHECK(parse_extraction_output(out).empty());
    // the unresolved note carries the synonym for the next retrieval pass
    CHECK(out.find("Breakdown Voltage") != std::string::npos);
}

TEST_CASE("rule mock matches rows by canonical parameter name when symbols differ") {
    auto chunk = table_chunk("2n7000k",
                             "| Gate Threshold Voltage | V_GS(th) | 1.0 | 1.35 | 2.1 | V | - |");
    auto req = request("2N7000K", {"VTO"});
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    ParameterSet params = parse_extraction_output(mock_rule_complete(built.request));
    const ParamEntry* vto = params.find("VTO", "");
    REQUIRE(vto != nullptr);
    CHECK(vto->value.lo == doctest::Approx(1.35));
}

TEST_CASE("rule mock ignores tables from other documents when the part's are present") {
    auto right = table_chunk("d1", "| Transition Frequency | f_T | - | 300 | - | MHz | - |", 0);
    auto wrong = table_chunk("d2", "| Transition Frequency | f_T | - | 450 | - | MHz | - |", 1);
    auto req = request("D1", {"f_T"});
    PromptBuild built = build_extraction_prompt({wrong, right}, req, PromptStage::Initial);
    ParameterSet params = parse_extraction_output(mock_rule_complete(built.request));
    const ParamEntry* ft = params.find("f_T", "");
    REQUIRE(ft != nullptr);
    CHECK(ft->value.lo == doctest::Approx(3e8));  // the d1 row, not d2's

    // without any matching-document table, all tables are considered
    PromptBuild only_wrong = build_extraction_prompt({wrong}, req, PromptStage::Initial);
    ParameterSet fallback = parse_extraction_output(mock_rule_complete(only_wrong.request));
    REQUIRE(fallback.find("f_T", "") != nullptr);
    CHECK(fallback.find("f_T", "")->value.lo == doctest::Approx(4.5e8));
}

TEST_CASE("mock output is deterministic for identical prompts") {
    auto chunk = table_chunk("2n7002e", "| Gate Threshold Voltage | VTO | 1.0 | 1.6 | 2.4 | V | - |");
    auto req = request("2N7002E", {"VTO", "BV"});
    PromptBuild built = build_extraction_prompt({chunk}, req, PromptStage::Initial);
    CHECK(mock_rule_complete(built.request) == mock_rule_complete(built.request));
}

TEST_CASE("answer block parsing: prose skipped, ranges, units, conditions") {
    ParameterSet params = parse_extraction_output(
        "Step 1: header identified.\nStep 2: row located.\nANSWER:\nVTO=1.6 V\n");
    REQUIRE(params.find("VTO", "") != nullptr);
    CHECK(params.find("VTO", "")->value.lo == doctest::Approx(1.6));

    ParameterSet range = parse_extraction_output("ANSWER:\nh_FE=40..300 @ none\n");
    const ParamEntry* gain = range.find("h_FE", "");
    REQUIRE(gain != nullptr);
    CHECK(gain->value.is_range);
    CHECK(gain->value.hi == doctest::Approx(300));

    ParameterSet si = parse_extraction_output("ANSWER:\nI_C=0.1 mA\n");
    REQUIRE(si.find("I_C", "") != nullptr);
    CHECK(si.find("I_C", "")->value.lo == doctest::Approx(1.0e-4));
    CHECK(si.find("I_C", "")->unit == "A");

    CHECK_THROWS_AS(parse_extraction_output("no block here"), ParseError);
}

TEST_CASE("render-then-parse is the identity on 200 fuzzed parameter sets") {
    std::mt19937_64 rng(2024);
    const char* symbols[] = {"h_FE", "VTO", "BV", "RS", "Ciss", "V_F", "R_DS(on)", "I_D"};
    const char* units[] = {"", "V", "A", "Ohm", "F", "Hz"};
    auto fuzz_value = [&]() {
        double mantissa = static_cast<double>(rng() % 100000) / 100.0;
        int exponent = static_cast<int>(rng() % 7) - 3;
        double v = mantissa * std::pow(10.0, exponent);
        // pin to the 6-significant-digit wire format
        return std::strtod(text::format_number(v).c_str(), nullptr);
    };
    for (int trial = 0; trial < 200; ++trial) {
        ParameterSet original;
        int entries = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < entries; ++e) {
            ParamEntry entry;
            entry.symbol = symbols[rng() % 8];
            bool is_range = rng() % 3 == 0;
            double lo = fuzz_value();
            entry.value = is_range ? ParamValue::range(lo, lo + std::abs(fuzz_value()))
                                   : ParamValue::scalar(lo);
            if (is_range) {
                entry.value.hi = std::strtod(text::format_number(entry.value.hi).c_str(), nullptr);
            }
            entry.unit = units[rng() % 6];
            if (rng() % 2) {
                Condition c;
                c.name = (rng() % 2) ? "I_C" : "V_CE";
                c.value = fuzz_value();
                c.unit = "V";
                entry.conditions = {c};
            }
            entry.confidence = entry.value.is_range ? Confidence::FallbackMinMax
                               : entry.conditions.empty() ? Confidence::TypPreferred
                                                          : Confidence::Exact;
            original.merge(entry);
        }
        ParameterSet parsed = parse_extraction_output("ANSWER:\n" + render_answer_block(original));
        REQUIRE(parsed.size() == original.size());
        for (const auto& [key, want] : original.entries) {
            auto it = parsed.entries.find(key);
            REQUIRE(it != parsed.entries.end());
            CHECK(it->second.symbol == want.symbol);
            CHECK(it->second.value == want.value);
            CHECK(it->second.unit == want.unit);
            CHECK(it->second.conditions == want.conditions);
            CHECK(it->second.confidence == want.confidence);
        }
    }
}

TEST_CASE("http backend speaks the chat-completions protocol against a stub") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string seen_body;
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"message":{"role":"assistant",)"
                        R"("content":"ANSWER:\nVTO=1.6 V"}}]})",
                        "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("DPX_API_KEY", "sk-test-key", 1);
    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.model = "stub-model";
    HttpBackend backend(cfg);
    CompletionResult result = backend.complete({"system text", "user text", 128, 0.0});
    unsetenv("DPX_API_KEY");
    CHECK(result.text == "ANSWER:\nVTO=1.6 V");
    CHECK(result.latency_ms > 0.0);
    CHECK(result.backend_id == "http:stub-model");
    CHECK(hits == 1);
    CHECK(seen_body.find("\"model\":\"stub-model\"") != std::string::npos);
    CHECK(seen_body.find("user text") != std::string::npos);
    CHECK(seen_auth == "Bearer sk-test-key");

    server.stop();
    server_thread.join();
}

TEST_CASE("http backend maps failure modes to typed errors") {
    httplib::Server server;
    server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_header("Retry-After", "7");
        res.set_content("slow down", "text/plain");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.model = "stub";
    HttpBackend backend(cfg);
    try {
        backend.complete({"s", "u", 16, 0.0});
        FAIL("expected RateLimited");
    } catch (const RateLimited& e) {
        CHECK(e.retry_after_seconds == doctest::Approx(7.0));
    }
    server.stop();
    server_thread.join();

    // connection refused -> TransportError
    HttpBackendConfig dead;
    dead.base_url = "http://127.0.0.1:1";
    dead.model = "stub";
    dead.timeout_ms = 500;
    HttpBackend dead_backend(dead);
    CHECK_THROWS_AS(dead_backend.complete({"s", "u", 16, 0.0}), BackendError);
}
