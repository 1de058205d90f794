#include "eas/csv.hpp"

#include <cstdio>

#include "eas/error.hpp"

namespace eas {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvBuilder::comment(const std::string& key, const std::string& value) {
    out_ += "# ";
    out_ += key;
    out_ += ": ";
    out_ += value;
    out_ += '\n';
}

void CsvBuilder::header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ += ',';
        out_ += columns[i];
    }
    out_ += '\n';
}

void CsvBuilder::row(const std::vector<std::string>& cells) {
    if (columns_ != 0 && cells.size() != columns_) {
        throw IoError("csv row has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        out_ += cells[i];
    }
    out_ += '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path);
    std::size_t written = std::fwrite(content.data(), 1, content.size(), f);
    bool ok = written == content.size();
    ok = std::fclose(f) == 0 && ok;
    if (!ok) throw IoError("write failed: " + path);
}

}  // namespace eas
