#include "dpx/units.hpp"

#include <array>
#include <cctype>
#include <cstdlib>

#include "dpx/text.hpp"

namespace dpx::units {

namespace {

constexpr std::array<std::string_view, 9> kBaseUnits = {
    "V", "A", "Ohm", "F", "W", "Hz", "s", "H", "C",
};

bool is_base_unit(std::string_view u) {
    for (auto b : kBaseUnits)
        if (u == b) return true;
    if (u == "\xCE\xA9") return true;  // Ω
    return false;
}

std::string canonical_base(std::string_view u) {
    if (u == "\xCE\xA9" || u == "ohm" || u == "OHM") return "Ohm";
    return std::string(u);
}

std::string strip_dc_ac(std::string_view u) {
    std::string s(u);
    if (s.size() >= 2) {
        std::string tail = text::to_lower(s.substr(s.size() - 2));
        if (tail == "dc" || tail == "ac") s.resize(s.size() - 2);
    }
    return s;
}

}  // namespace

std::pair<double, std::string> normalize_unit(std::string_view unit) {
    std::string u = strip_dc_ac(text::trim(unit));
    if (u.empty() || u == "-" || u == "\xE2\x80\x94") return {1.0, ""};
    if (is_base_unit(u)) return {1.0, canonical_base(u)};

    struct Prefix {
        std::string_view sym;
        double factor;
    };
    static constexpr std::array<Prefix, 6> kPrefixes = {{
        {"p", 1e-12},
        {"n", 1e-9},
        {"u", 1e-6},
        {"m", 1e-3},
        {"k", 1e3},
        {"M", 1e6},
    }};

    // µ as UTF-8 (0xC2 0xB5).
    if (u.size() > 2 && static_cast<unsigned char>(u[0]) == 0xC2 &&
        static_cast<unsigned char>(u[1]) == 0xB5) {
        std::string rest = u.substr(2);
        if (is_base_unit(rest)) return {1e-6, canonical_base(rest)};
    }
    for (const auto& p : kPrefixes) {
        if (u.size() > p.sym.size() && u.compare(0, p.sym.size(), p.sym) == 0) {
            std::string rest = u.substr(p.sym.size());
            if (is_base_unit(rest)) return {p.factor, canonical_base(rest)};
        }
    }
    // Unknown unit: keep verbatim.
    return {1.0, u};
}

std::optional<Quantity> parse_quantity(std::string_view s) {
    std::string t = text::trim(s);
    if (t.empty()) return std::nullopt;
    const char* begin = t.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    std::string unit = text::trim(std::string_view(end));
    auto [factor, base] = normalize_unit(unit);
    return Quantity{v * factor, base};
}

bool is_numeric_cell(std::string_view cell) {
    std::string t = text::trim(cell);
    if (t.empty() || t == "-" || t == "\xE2\x80\x94") return false;  // "-" or em dash
    return parse_quantity(t).has_value();
}

}  // namespace dpx::units
