#pragma once

#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace bohmex {

// Minimal CSV emitter. Numbers print with %.17g so repeated runs with the
// same seed produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : fp_(std::fopen(path.c_str(), "wb")), cols_(header.size()) {
        if (!fp_) throw Error("CsvWriter: cannot open " + path);
        for (size_t i = 0; i < header.size(); ++i)
            std::fprintf(fp_, "%s%s", header[i].c_str(),
                         i + 1 < header.size() ? "," : "\n");
    }
    ~CsvWriter() {
        if (fp_) std::fclose(fp_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(std::initializer_list<double> values) {
        size_t i = 0;
        for (double v : values)
            std::fprintf(fp_, "%.17g%s", v, ++i < values.size() ? "," : "\n");
    }
    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i)
            std::fprintf(fp_, "%.17g%s", values[i], i + 1 < values.size() ? "," : "\n");
    }
    // mixed rows with a leading label
    void row_labeled(const std::string& label, const std::vector<double>& values) {
        std::fprintf(fp_, "%s", label.c_str());
        for (double v : values) std::fprintf(fp_, ",%.17g", v);
        std::fprintf(fp_, "\n");
    }

  private:
    std::FILE* fp_;
    size_t cols_;
};

} // namespace bohmex
