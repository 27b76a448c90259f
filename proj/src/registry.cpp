#include "csecoc/registry.hpp"

#include "csecoc/error.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>

namespace csecoc {

std::optional<CsvSchema::Label> parse_label_column(std::string_view text, std::size_t* index) {
  if (text == "first") return CsvSchema::Label::first;
  if (text == "last") return CsvSchema::Label::last;
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) {
    if (index) *index = v;
    return CsvSchema::Label::index;
  }
  return std::nullopt;
}

std::optional<MissingPolicy> parse_missing_policy(std::string_view text) {
  if (text == "drop_row") return MissingPolicy::drop_row;
  if (text == "mean_impute") return MissingPolicy::mean_impute;
  return std::nullopt;
}

std::string_view to_string(MissingPolicy p) {
  return p == MissingPolicy::drop_row ? "drop_row" : "mean_impute";
}

std::vector<DatasetEntry> load_registry(const std::filesystem::path& data_dir) {
  const auto path = data_dir / "datasets.json";
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open dataset registry '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, path.string() + ": " + e.what());
  }

  std::vector<DatasetEntry> out;
  try {
    for (const auto& item : doc.at("datasets")) {
      DatasetEntry e;
      e.name = item.at("name").get<std::string>();
      e.file = item.at("file").get<std::string>();
      e.note = item.value("note", "");
      const auto label = item.value("label_column", std::string("last"));
      const auto parsed = parse_label_column(label, &e.schema.label_index);
      if (!parsed) fail(ErrorCode::parse, "dataset '" + e.name + "': bad label_column '" + label + "'");
      e.schema.label = *parsed;
      e.schema.has_header = item.value("header", false);
      const auto missing = item.value("missing", std::string("drop_row"));
      const auto policy = parse_missing_policy(missing);
      if (!policy) fail(ErrorCode::parse, "dataset '" + e.name + "': bad missing policy '" + missing + "'");
      e.schema.missing = *policy;
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, path.string() + ": " + e.what());
  }
  return out;
}

std::optional<DatasetEntry> find_dataset(const std::vector<DatasetEntry>& registry, std::string_view name) {
  for (const auto& e : registry) {
    if (e.name == name) return e;
  }
  return std::nullopt;
}

Dataset resolve_dataset(const std::filesystem::path& data_dir, std::string_view name_or_path,
                        const CsvSchema& fallback) {
  if (std::filesystem::exists(data_dir / "datasets.json")) {
    if (auto e = find_dataset(load_registry(data_dir), name_or_path)) {
      return load_csv(data_dir / e->file, e->schema);
    }
  }
  return load_csv(std::filesystem::path(name_or_path), fallback);
}

}  // namespace csecoc
