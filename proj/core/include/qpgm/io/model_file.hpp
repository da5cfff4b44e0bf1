#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qpgm/classifier.hpp"

namespace qpgm::io {

inline constexpr int kModelFileVersion = 1;

/// A trained classifier with the dictionaries needed to read raw CSVs.
struct ModelBundle {
  PgmClassifier model;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
};

/// JSON with every double written as its shortest round-trip decimal, so a
/// reload reproduces the in-memory numbers bit for bit.
std::string to_json(const ModelBundle& bundle);
ModelBundle model_from_json(std::string_view text);

ModelBundle load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ModelBundle& bundle);

}  // namespace qpgm::io
