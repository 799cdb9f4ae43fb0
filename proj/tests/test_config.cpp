#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpx/config.hpp"
#include "dpx/errors.hpp"

using namespace dpx;

TEST_CASE("config text populates every section") {
    CliConfig cfg;
    cfg.apply_text(R"(
# retrieval knobs
[tdr]
max_distance = 3
max_recommendations = 7

[iro]
max_iterations = 4
top_k = 6
convergence = fixed_point
max_prompt_chars = 4000
backend_retries = 2
chunk_max_chars = 400

[po]
electrical_characteristics = 1
thermal_characteristics = 2
other = 9

[backend]
kind = mock
mock_delay_ms = 1.5

[mapping]
Ciss = CGDO
h_FE = BF
)");
    CHECK(cfg.pipeline.tdr.max_distance == 3);
    CHECK(cfg.pipeline.tdr.max_recommendations == 7);
    CHECK(cfg.pipeline.iro.max_iterations == 4);
    CHECK(cfg.pipeline.iro.top_k == 6);
    CHECK(cfg.pipeline.iro.convergence == Convergence::FixedPoint);
    CHECK(cfg.pipeline.iro.max_prompt_chars == 4000);
    CHECK(cfg.pipeline.iro.backend_retries == 2);
    CHECK(cfg.pipeline.chunk_max_chars == 400);
    CHECK(cfg.pipeline.priorities.tiers.at(SectionKind::ThermalCharacteristics) == 2);
    CHECK(cfg.pipeline.priorities.tiers.at(SectionKind::Other) == 9);
    CHECK(cfg.backend_kind == "mock");
    CHECK(cfg.mock.inject_delay_ms == doctest::Approx(1.5));
    CHECK(cfg.mapping.symbol_to_key.at("Ciss") == "CGDO");
    CHECK(cfg.mapping.symbol_to_key.at("h_FE") == "BF");
}

TEST_CASE("http backend requires base_url and model") {
    CliConfig cfg;
    CHECK_THROWS_AS(cfg.apply_text("[backend]\nkind = http\n"), Error);
    CliConfig ok;
    ok.apply_text(
        "[backend]\nkind = http\nbase_url = \"http://localhost:9000\"\nmodel = m1\n"
        "temperature = 0.2\nmax_tokens = 256\ntimeout_ms = 1000\nmax_inflight = 2\n");
    CHECK(ok.backend_kind == "http");
    CHECK(ok.http.base_url == "http://localhost:9000");
    CHECK(ok.http.model == "m1");
    CHECK(ok.http.temperature == doctest::Approx(0.2));
    CHECK(ok.http.max_inflight == 2);
}

TEST_CASE("malformed config lines are rejected with context") {
    CliConfig cfg;
    CHECK_THROWS_AS(cfg.apply_text("[tdr]\nnot a pair\n"), Error);
    CHECK_THROWS_AS(cfg.apply_text("[tdr]\nbogus_key = 1\n"), Error);
    CHECK_THROWS_AS(cfg.apply_text("[nosuch]\nx = 1\n"), Error);
    CHECK_THROWS_AS(cfg.apply_text("[po]\nnot_a_label = 1\n"), Error);
    CHECK_THROWS_AS(cfg.apply_text("[iro]\nconvergence = sometimes\n"), Error);
    CHECK_THROWS_AS(cfg.apply_file("definitely_missing.toml"), Error);
}
