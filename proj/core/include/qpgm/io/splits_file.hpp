#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpgm/selection.hpp"

namespace qpgm::io {

inline constexpr int kSplitFileVersion = 1;

/// Repeated train/test partitions bound to a dataset by fingerprint. Files
/// produced elsewhere are accepted as long as they follow the same schema;
/// "provenance" is then free-form.
struct SplitFile {
  std::string fingerprint_algorithm;
  std::string fingerprint;
  std::size_t num_rows = 0;
  std::optional<std::uint64_t> master_seed;
  std::optional<double> test_fraction;
  std::string generator;
  std::vector<SplitPlan> splits;
};

std::string to_json(const SplitFile& file);
/// Validates every repetition against num_rows (InvalidArgument -> SchemaMismatch).
SplitFile split_file_from_json(std::string_view text);

SplitFile load_split_file(const std::filesystem::path& path);
void save_split_file(const std::filesystem::path& path, const SplitFile& file);

/// Throws FingerprintMismatch when the split file was made for other data.
void require_fingerprint(const SplitFile& file, std::string_view dataset_fingerprint, std::size_t num_rows);

}  // namespace qpgm::io
