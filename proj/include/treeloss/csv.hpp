#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "treeloss/format.hpp"

namespace treeloss {

/// RFC 4180 quoting: fields holding a comma, quote or newline are wrapped in
/// double quotes with inner quotes doubled. Canonical model labels such as
/// "gamma(5,1)" contain commas, so this triggers routinely.
inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Minimal CSV emitter with a fixed numeric precision per file. Output is
/// byte-deterministic: locale-free formatting, '\n' line ends, and non-finite
/// numbers are rejected upstream by format_double.
class CsvWriter {
public:
    /// sig_digits > 0 rounds numeric cells; 0 keeps full (round-trip) precision.
    CsvWriter(std::ostream& out, int sig_digits) : out_(out), sig_digits_(sig_digits) {}

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << csv_escape(cells[i]);
        }
        out_ << '\n';
    }

    std::string num(double value) const { return format_double(value, sig_digits_); }

private:
    std::ostream& out_;
    int sig_digits_;
};

}  // namespace treeloss
