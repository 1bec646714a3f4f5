#include "seqcop/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace seqcop {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            fields.push_back(cur);
            cur.clear();
        }
    };
    for (char c : line) {
        if (c == ',' || c == '\t' || c == ' ' || c == ';') {
            flush();
        } else if (c == '\r') {
            continue;
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return fields;
}

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

DataMatrix read_delimited(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> fields = split_fields(line);
        if (fields.empty() || fields[0].starts_with('#')) continue;
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_double(fields[j], row[j])) {
                numeric = false;
                if (!first_data_line) {
                    throw std::runtime_error("parse error at line " + std::to_string(lineno) +
                                             ", column " + std::to_string(j + 1) + ": '" +
                                             fields[j] + "' is not a number");
                }
                break;
            }
        }
        if (!numeric) {
            // a single non-numeric first line is treated as a header
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        if (cols == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw std::runtime_error("line " + std::to_string(lineno) + " has " +
                                     std::to_string(row.size()) + " fields, expected " +
                                     std::to_string(cols));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!std::isfinite(row[j])) {
                throw std::runtime_error("non-finite value at line " + std::to_string(lineno) +
                                         ", column " + std::to_string(j + 1));
            }
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("no data rows in '" + path.string() + "'");
    return DataMatrix(rows, cols, std::move(values));
}

void write_delimited(const std::filesystem::path& path, const DataMatrix& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.precision(17);
    for (std::size_t i = 0; i < data.rows; ++i) {
        for (std::size_t j = 0; j < data.cols; ++j) {
            if (j) out << '\t';
            out << data(i, j);
        }
        out << '\n';
    }
}

void write_tsv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << '\t';
        out << header[j];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << '\t';
            out << row[j];
        }
        out << '\n';
    }
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void write_manifest(const std::filesystem::path& path,
                    std::vector<std::pair<std::string, std::string>> entries) {
    std::sort(entries.begin(), entries.end());
    std::ostringstream body;
    for (const auto& [k, v] : entries) body << k << '=' << v << '\n';
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << body.str();
    out << "config_hash=" << std::hex << fnv1a(body.str()) << '\n';
}

}  // namespace seqcop
