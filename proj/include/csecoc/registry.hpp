#pragma once

#include "csecoc/dataset.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csecoc {

/// One entry of <data_dir>/datasets.json.
struct DatasetEntry {
  std::string name;
  std::string file;
  CsvSchema schema;
  std::string note;
};

std::vector<DatasetEntry> load_registry(const std::filesystem::path& data_dir);

std::optional<DatasetEntry> find_dataset(const std::vector<DatasetEntry>& registry, std::string_view name);

/// Registered name -> its file and schema under data_dir; anything else is
/// read as a CSV path with `fallback`.
Dataset resolve_dataset(const std::filesystem::path& data_dir, std::string_view name_or_path,
                        const CsvSchema& fallback);

std::optional<CsvSchema::Label> parse_label_column(std::string_view text, std::size_t* index);
std::optional<MissingPolicy> parse_missing_policy(std::string_view text);
std::string_view to_string(MissingPolicy p);

}  // namespace csecoc
