#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "seqcop/copula_process.hpp"

namespace seqcop {

/// Reads delimited text (comma, tab or whitespace separated), one row per
/// time index, optional single header line. Throws std::runtime_error with
/// row/column diagnostics on parse failures, NaN and ragged rows.
DataMatrix read_delimited(const std::filesystem::path& path);

/// Writes tab-separated values, one row per time index.
void write_delimited(const std::filesystem::path& path, const DataMatrix& data);

/// Writes a TSV table: a header row plus string cells.
void write_tsv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// FNV-1a hash of a string; used to fingerprint configurations in manifests.
std::uint64_t fnv1a(const std::string& text);

/// Writes a run manifest: sorted key=value lines plus a config hash, enough
/// to reproduce the run bit-for-bit at parallelism 1.
void write_manifest(const std::filesystem::path& path,
                    std::vector<std::pair<std::string, std::string>> entries);

}  // namespace seqcop
