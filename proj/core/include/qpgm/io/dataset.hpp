#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpgm/encoding.hpp"
#include "qpgm/pgm.hpp"

namespace qpgm::io {

/// Feature table: header row, one string label column, all other columns real.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<FeatureVector> rows;
  bool has_labels = false;
  std::vector<std::string> raw_labels;   // per row, when has_labels
  std::vector<std::string> class_names;  // sorted distinct labels
  std::vector<ClassId> labels;           // index into class_names
  std::string fingerprint;               // of the source bytes

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t num_features() const noexcept { return feature_names.size(); }
};

/// Parses CSV text. Missing or non-numeric feature cells are rejected with
/// the 1-based line and the column name (ParseError). When require_labels is
/// false the label column may be absent.
Dataset parse_dataset(std::string_view text, std::string_view label_column = "label",
                      bool require_labels = true);

Dataset load_dataset(const std::filesystem::path& path, std::string_view label_column = "label",
                     bool require_labels = true);

/// Maps the dataset's raw labels onto an existing class dictionary. Throws
/// SchemaMismatch on a label the dictionary does not contain.
std::vector<ClassId> labels_against(const Dataset& data, std::span<const std::string> class_names);

/// Throws SchemaMismatch naming the first column that differs.
void require_feature_schema(const Dataset& data, std::span<const std::string> expected);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace qpgm::io
