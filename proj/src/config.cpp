#include "dpx/config.hpp"

#include <fstream>
#include <sstream>

#include "dpx/errors.hpp"
#include "dpx/text.hpp"

namespace dpx {

namespace {

SectionKind section_kind_from_key(const std::string& key) {
    std::string k = text::to_lower(key);
    if (k == "electrical_characteristics") return SectionKind::ElectricalCharacteristics;
    if (k == "absolute_maximum_ratings") return SectionKind::AbsoluteMaximumRatings;
    if (k == "typical_performance_curves") return SectionKind::TypicalPerformanceCurves;
    if (k == "thermal_characteristics") return SectionKind::ThermalCharacteristics;
    if (k == "package_information") return SectionKind::PackageInformation;
    if (k == "other") return SectionKind::Other;
    throw Error("unknown section label in [po] config: " + key);
}

}  // namespace

void CliConfig::apply_text(const std::string& contents) {
    std::istringstream in(contents);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = text::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = text::to_lower(text::trim(t.substr(1, t.size() - 2)));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(text::format("config line %d is not key = value", line_no));
        }
        std::string key = text::trim(t.substr(0, eq));
        std::string value = text::trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }

        auto as_int = [&]() { return std::stoi(value); };
        auto as_double = [&]() { return std::stod(value); };

        if (section == "tdr") {
            if (key == "max_distance") pipeline.tdr.max_distance = as_int();
            else if (key == "max_recommendations") pipeline.tdr.max_recommendations = as_int();
            else throw Error("unknown [tdr] key: " + key);
        } else if (section == "iro") {
            if (key == "max_iterations") pipeline.iro.max_iterations = as_int();
            else if (key == "top_k") pipeline.iro.top_k = as_int();
            else if (key == "max_prompt_chars") pipeline.iro.max_prompt_chars = as_int();
            else if (key == "backend_retries") pipeline.iro.backend_retries = as_int();
            else if (key == "chunk_max_chars") pipeline.chunk_max_chars = as_int();
            else if (key == "convergence") {
                std::string v = text::to_lower(value);
                if (v == "fixed_point") pipeline.iro.convergence = Convergence::FixedPoint;
                else if (v == "all_resolved")
                    pipeline.iro.convergence = Convergence::AllParamsResolved;
                else if (v == "either") pipeline.iro.convergence = Convergence::Either;
                else throw Error("unknown convergence mode: " + value);
            } else {
                throw Error("unknown [iro] key: " + key);
            }
        } else if (section == "po") {
            pipeline.priorities.tiers[section_kind_from_key(key)] = as_int();
        } else if (section == "backend") {
            if (key == "kind") backend_kind = text::to_lower(value);
            else if (key == "base_url") http.base_url = value;
            else if (key == "model") http.model = value;
            else if (key == "temperature") http.temperature = as_double();
            else if (key == "max_tokens") http.max_tokens = as_int();
            else if (key == "timeout_ms") http.timeout_ms = as_int();
            else if (key == "max_inflight") http.max_inflight = as_int();
            else if (key == "mock_delay_ms") mock.inject_delay_ms = as_double();
            else throw Error("unknown [backend] key: " + key);
        } else if (section == "mapping") {
            mapping.symbol_to_key[key] = value;
        } else {
            throw Error("unknown config section: [" + section + "]");
        }
    }
    if (backend_kind == "http" && (http.base_url.empty() || http.model.empty())) {
        throw Error("http backend requires base_url and model in [backend]");
    }
}

void CliConfig::apply_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(ss.str());
}

}  // namespace dpx
