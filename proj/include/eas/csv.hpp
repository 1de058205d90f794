#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eas {

// Shortest-exact formatting is not stable across libc versions, so every
// double in CSV and model files is written with %.17g: enough digits for an
// exact round-trip, and byte-identical between runs.
std::string fmt_g17(double x);

// Deterministic CSV assembly: '# key: value' comment lines (config echo),
// one header row, then data rows. All writing goes through a single builder
// so files are byte-identical across reruns regardless of thread count.
class CsvBuilder {
public:
    void comment(const std::string& key, const std::string& value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    const std::string& str() const { return out_; }

private:
    std::string out_;
    std::size_t columns_ = 0;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace eas
