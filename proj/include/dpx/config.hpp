#pragma once

#include <map>
#include <string>

#include "dpx/backend.hpp"
#include "dpx/devicegen.hpp"
#include "dpx/pipeline.hpp"

namespace dpx {

// Tool-level configuration: pipeline knobs plus backend selection and the
// symbol-mapping overrides. Loaded from a key-value config file with
// [tdr] [iro] [po] [backend] [mapping] sections.
struct CliConfig {
    PipelineConfig pipeline;
    std::string backend_kind = "mock";  // mock | http
    HttpBackendConfig http;
    MockScript mock;
    MappingTable mapping = MappingTable::defaults();

    void apply_file(const std::string& path);
    void apply_text(const std::string& contents);
};

}  // namespace dpx
