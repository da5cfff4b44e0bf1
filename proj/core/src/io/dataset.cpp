#include "qpgm/io/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "qpgm/error.hpp"
#include "qpgm/format.hpp"
#include "qpgm/io/csv.hpp"
#include "qpgm/io/fingerprint.hpp"

namespace qpgm::io {

Dataset parse_dataset(std::string_view text, std::string_view label_column, bool require_labels) {
  const auto table = parse_csv(text);
  if (table.empty()) throw Error(ErrorKind::ParseError, "dataset has no header row");
  const CsvRow& header = table.front();

  Dataset data;
  data.fingerprint = fingerprint(text);
  std::ptrdiff_t label_pos = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column) {
      if (label_pos >= 0) throw Error(ErrorKind::ParseError, "label column '" + std::string(label_column) + "' appears twice");
      label_pos = static_cast<std::ptrdiff_t>(c);
    } else {
      if (header[c].empty()) throw Error(ErrorKind::ParseError, "empty column name at position " + std::to_string(c + 1));
      data.feature_names.push_back(header[c]);
    }
  }
  data.has_labels = label_pos >= 0;
  if (require_labels && !data.has_labels) {
    throw Error(ErrorKind::SchemaMismatch, "label column '" + std::string(label_column) + "' not found");
  }
  if (data.feature_names.empty()) throw Error(ErrorKind::ParseError, "dataset has no feature columns");

  const auto d = static_cast<Eigen::Index>(data.feature_names.size());
  for (std::size_t r = 1; r < table.size(); ++r) {
    const CsvRow& row = table[r];
    const std::string where = "line " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw Error(ErrorKind::ParseError, where + ": expected " + std::to_string(header.size()) + " fields, got " +
                                             std::to_string(row.size()));
    }
    FeatureVector x(d);
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_pos) {
        if (row[c].empty()) throw Error(ErrorKind::ParseError, where + ": missing label");
        data.raw_labels.push_back(row[c]);
        continue;
      }
      const std::string& column = header[c];
      if (row[c].empty()) throw Error(ErrorKind::ParseError, where + ", column '" + column + "': missing value");
      try {
        x[j] = parse_double(row[c]);
      } catch (const Error&) {
        throw Error(ErrorKind::ParseError, where + ", column '" + column + "': not a number: '" + row[c] + "'");
      }
      if (!std::isfinite(x[j])) {
        throw Error(ErrorKind::ParseError, where + ", column '" + column + "': non-finite value");
      }
      ++j;
    }
    data.rows.push_back(std::move(x));
  }

  if (data.has_labels) {
    data.class_names = data.raw_labels;
    std::sort(data.class_names.begin(), data.class_names.end());
    data.class_names.erase(std::unique(data.class_names.begin(), data.class_names.end()), data.class_names.end());
    data.labels = labels_against(data, data.class_names);
  }
  return data;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::IoError, "short write to '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

Dataset load_dataset(const std::filesystem::path& path, std::string_view label_column, bool require_labels) {
  try {
    return parse_dataset(read_file(path), label_column, require_labels);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

std::vector<ClassId> labels_against(const Dataset& data, std::span<const std::string> class_names) {
  if (!data.has_labels) throw Error(ErrorKind::SchemaMismatch, "dataset has no label column");
  std::map<std::string, ClassId, std::less<>> index;
  for (std::size_t c = 0; c < class_names.size(); ++c) index.emplace(class_names[c], c);
  std::vector<ClassId> out;
  out.reserve(data.raw_labels.size());
  for (std::size_t r = 0; r < data.raw_labels.size(); ++r) {
    const auto it = index.find(data.raw_labels[r]);
    if (it == index.end()) {
      throw Error(ErrorKind::SchemaMismatch, "row " + std::to_string(r) + ": unknown label '" +
                                                 data.raw_labels[r] + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

void require_feature_schema(const Dataset& data, std::span<const std::string> expected) {
  const std::size_t n = std::max(data.feature_names.size(), expected.size());
  for (std::size_t c = 0; c < n; ++c) {
    if (c >= data.feature_names.size()) {
      throw Error(ErrorKind::SchemaMismatch, "missing feature column '" + expected[c] + "'");
    }
    if (c >= expected.size()) {
      throw Error(ErrorKind::SchemaMismatch, "unexpected feature column '" + data.feature_names[c] + "'");
    }
    if (data.feature_names[c] != expected[c]) {
      throw Error(ErrorKind::SchemaMismatch, "feature column " + std::to_string(c + 1) + " is '" +
                                                 data.feature_names[c] + "', model expects '" + expected[c] + "'");
    }
  }
}

}  // namespace qpgm::io
