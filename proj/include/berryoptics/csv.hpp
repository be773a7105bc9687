#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "berryoptics/errors.hpp"

namespace berryoptics {

/// Full-precision, locale-independent double formatting (17 significant
/// digits, '.' decimal point) so that identical runs give byte-identical
/// files.
inline std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // canonical zero, no "-0"
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open " + path + " for writing");
        for (size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double(values[i]);
        }
        out_ << '\n';
    }

    void row_mixed(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace berryoptics
