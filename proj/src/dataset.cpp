#include "csecoc/dataset.hpp"

#include "csecoc/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace csecoc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  if (field.empty() || field == "?") return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

Dataset::Dataset(FeatureMatrix features, std::vector<int> labels,
                 std::vector<std::string> class_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      class_counts_(class_names_.size(), 0) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    fail(ErrorCode::invalid_argument, "feature rows and label count differ");
  }
  if (labels_.empty()) fail(ErrorCode::data, "dataset has no rows");
  if (!features_.allFinite()) fail(ErrorCode::data, "dataset contains non-finite feature values");
  for (int label : labels_) {
    if (label < 0 || label >= class_count()) {
      fail(ErrorCode::data, "label index " + std::to_string(label) + " out of range");
    }
    ++class_counts_[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < class_counts_.size(); ++c) {
    if (class_counts_[c] == 0) {
      fail(ErrorCode::data, "class '" + class_names_[c] + "' has zero samples");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix x(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<int> y(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(indices[i]));
    y[i] = labels_[indices[i]];
  }
  return Dataset(std::move(x), std::move(y), class_names_);
}

Dataset Dataset::with_features(FeatureMatrix features) const {
  if (features.rows() != features_.rows() || features.cols() != features_.cols()) {
    fail(ErrorCode::invalid_argument, "replacement feature matrix has a different shape");
  }
  Dataset out(std::move(features), labels_, class_names_);
  out.set_ingestion_notes(dropped_rows_, imputed_values_);
  return out;
}

Dataset parse_csv(std::istream& in, const CsvSchema& schema) {
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::string> raw_labels;
  std::size_t expected_fields = 0;
  std::size_t line_no = 0;
  bool header_pending = schema.has_header;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (expected_fields == 0) {
      expected_fields = fields.size();
      if (expected_fields < 2) fail(ErrorCode::parse, "need at least one feature and a label column");
    } else if (fields.size() != expected_fields) {
      fail(ErrorCode::parse, "ragged row at line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(expected_fields) + " fields, found " +
                                 std::to_string(fields.size()));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::size_t label_col = 0;
    switch (schema.label) {
      case CsvSchema::Label::first: label_col = 0; break;
      case CsvSchema::Label::last: label_col = fields.size() - 1; break;
      case CsvSchema::Label::index: label_col = schema.label_index; break;
    }
    if (label_col >= fields.size()) {
      fail(ErrorCode::parse, "label column " + std::to_string(label_col) + " not present");
    }

    std::vector<std::optional<double>> row;
    row.reserve(fields.size() - 1);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j != label_col) row.push_back(parse_number(fields[j]));
    }
    cells.push_back(std::move(row));
    raw_labels.emplace_back(fields[label_col]);
  }
  if (in.bad()) fail(ErrorCode::io, "read error");

  const std::size_t feature_count = expected_fields == 0 ? 0 : expected_fields - 1;

  // Rows with an unusable label are dropped under either policy.
  std::vector<std::size_t> keep;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    bool usable = !raw_labels[i].empty() && raw_labels[i] != "?";
    if (usable && schema.missing == MissingPolicy::drop_row) {
      for (const auto& v : cells[i]) usable = usable && v.has_value();
    }
    if (usable) {
      keep.push_back(i);
    } else {
      ++dropped;
    }
  }
  if (keep.empty()) fail(ErrorCode::data, "zero rows after missing-value handling");

  std::vector<double> column_mean(feature_count, 0.0);
  std::size_t imputed = 0;
  if (schema.missing == MissingPolicy::mean_impute) {
    for (std::size_t j = 0; j < feature_count; ++j) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i : keep) {
        if (cells[i][j]) {
          sum += *cells[i][j];
          ++n;
        }
      }
      if (n == 0) fail(ErrorCode::data, "feature column " + std::to_string(j) + " has no values");
      column_mean[j] = sum / static_cast<double>(n);
    }
  }

  FeatureMatrix x(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(feature_count));
  std::vector<int> labels(keep.size());
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_index;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t i = keep[r];
    for (std::size_t j = 0; j < feature_count; ++j) {
      if (cells[i][j]) {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = *cells[i][j];
      } else {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = column_mean[j];
        ++imputed;
      }
    }
    auto [it, inserted] = class_index.try_emplace(raw_labels[i], static_cast<int>(class_names.size()));
    if (inserted) class_names.push_back(raw_labels[i]);
    labels[r] = it->second;
  }
  if (class_names.size() < 2) fail(ErrorCode::data, "class count < 2");

  Dataset ds(std::move(x), std::move(labels), std::move(class_names));
  ds.set_ingestion_notes(dropped, imputed);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  try {
    return parse_csv(in, schema);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Vector class_centroid(const Dataset& ds, int c) {
  if (c < 0 || c >= ds.class_count()) fail(ErrorCode::invalid_argument, "class index out of range");
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(ds.feature_count()));
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    if (ds.label(i) == c) sum += ds.features().row(static_cast<Eigen::Index>(i)).transpose();
  }
  return sum / static_cast<double>(ds.class_counts()[static_cast<std::size_t>(c)]);
}

Standardizer Standardizer::fit(const Dataset& ds) {
  const auto& x = ds.features();
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().mean();
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  if (x.cols() != mean.size()) fail(ErrorCode::invalid_argument, "standardizer feature count mismatch");
  FeatureMatrix out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = (out.row(i).transpose() - mean).cwiseQuotient(scale).transpose();
  }
  return out;
}

Dataset Standardizer::apply(const Dataset& ds) const { return ds.with_features(apply(ds.features())); }

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean.size()) {
    fail(ErrorCode::invalid_argument, "standardizer feature count mismatch");
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out[j] = (x[j] - mean(jj)) / scale(jj);
  }
  return out;
}

}  // namespace csecoc
