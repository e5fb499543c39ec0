#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cspc/charts.hpp"
#include "cspc/core.hpp"

namespace cspc {

enum class dataset_kind { individuals, subgroups, labeled, vectors };

/// One parsed input file. Only the member matching `kind` is populated.
struct dataset {
    dataset_kind kind = dataset_kind::individuals;
    std::vector<observation> individuals;
    std::vector<subgroup> subgroups;
    std::vector<labeled_point> labeled;
    std::vector<process_vector> vectors;

    std::size_t size() const;
};

/// Delimited text (comma or tab) with a mandatory header row. The header
/// decides the dataset kind:
///   value            -> individuals
///   subgroup,value   -> subgroups (consecutive rows with equal ids group)
///   x,y or x1..xd,y  -> labeled points
///   v1..vd           -> process vectors
/// Parse errors name the offending line number.
dataset parse_dataset(std::string_view text, std::string_view source_name);
dataset read_dataset(const std::filesystem::path& path);

/// Chart series as a tab-separated table with a `# kind=...` metadata line.
std::string format_chart_series(const chart_series& series);

/// FNV-1a 64-bit digest, hex encoded; used for archive provenance.
std::string digest_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace cspc
