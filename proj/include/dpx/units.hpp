#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace dpx::units {

// A physical value normalized to its SI base unit. Unknown units are kept
// verbatim with factor 1 so that e.g. luminous intensity in "mcd" still
// compares symbol-to-symbol.
struct Quantity {
    double value = 0.0;
    std::string unit;  // base unit after prefix folding ("V", "A", "Ohm", ...)

    bool operator==(const Quantity&) const = default;
};

// Parse "<number> <unit>" or "<number><unit>". Recognized SI prefixes:
// p, n, u/µ, m, k, M. A trailing "dc"/"DC"/"ac" qualifier on the unit is
// dropped (datasheet convention: mAdc, Vdc). Returns nullopt when no leading
// number is present.
std::optional<Quantity> parse_quantity(std::string_view s);

// Fold a unit string: strips dc/ac qualifier, resolves prefix against the
// known base units. Returns {factor, base_unit}.
std::pair<double, std::string> normalize_unit(std::string_view unit);

// True when the cell holds a numeric value (possibly with a unit); dashes and
// empty cells are non-values.
bool is_numeric_cell(std::string_view cell);

}  // namespace dpx::units
