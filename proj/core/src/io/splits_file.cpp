#include "qpgm/io/splits_file.hpp"

#include <json.hpp>

#include "qpgm/error.hpp"
#include "qpgm/io/dataset.hpp"
#include "qpgm/io/fingerprint.hpp"

namespace qpgm::io {

using ojson = nlohmann::ordered_json;

std::string to_json(const SplitFile& file) {
  ojson j;
  j["format"] = "qpgm-splits";
  j["version"] = kSplitFileVersion;
  j["fingerprint"] = {{"algorithm", file.fingerprint_algorithm}, {"digest", file.fingerprint}};
  j["num_rows"] = file.num_rows;
  ojson prov = ojson::object();
  prov["generator"] = file.generator;
  if (file.master_seed) prov["master_seed"] = *file.master_seed;
  if (file.test_fraction) prov["test_fraction"] = *file.test_fraction;
  j["provenance"] = prov;
  ojson reps = ojson::array();
  for (const auto& s : file.splits) {
    reps.push_back({{"id", s.repetition}, {"seed", s.seed}, {"train", s.train}, {"test", s.test}});
  }
  j["repetitions"] = reps;
  return j.dump(1) + "\n";
}

SplitFile split_file_from_json(std::string_view text) {
  SplitFile file;
  try {
    const auto j = ojson::parse(text);
    if (j.value("format", "") != "qpgm-splits") throw Error(ErrorKind::SchemaMismatch, "not a split file");
    if (j.at("version").get<int>() != kSplitFileVersion) {
      throw Error(ErrorKind::SchemaMismatch, "unsupported split file version");
    }
    file.fingerprint_algorithm = j.at("fingerprint").at("algorithm").get<std::string>();
    file.fingerprint = j.at("fingerprint").at("digest").get<std::string>();
    file.num_rows = j.at("num_rows").get<std::size_t>();
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      file.generator = p.value("generator", "");
      if (p.contains("master_seed")) file.master_seed = p["master_seed"].get<std::uint64_t>();
      if (p.contains("test_fraction")) file.test_fraction = p["test_fraction"].get<double>();
    }
    for (const auto& r : j.at("repetitions")) {
      SplitPlan plan;
      plan.repetition = r.at("id").get<std::size_t>();
      plan.seed = r.value("seed", std::uint64_t{0});
      plan.train = r.at("train").get<std::vector<std::size_t>>();
      plan.test = r.at("test").get<std::vector<std::size_t>>();
      file.splits.push_back(std::move(plan));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("split file: ") + e.what());
  }
  if (file.splits.empty()) throw Error(ErrorKind::SchemaMismatch, "split file has no repetitions");
  for (const auto& plan : file.splits) {
    try {
      validate_split(plan, file.num_rows);
    } catch (const Error& e) {
      throw Error(ErrorKind::SchemaMismatch, e.detail());
    }
  }
  return file;
}

SplitFile load_split_file(const std::filesystem::path& path) {
  try {
    return split_file_from_json(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

void save_split_file(const std::filesystem::path& path, const SplitFile& file) { write_file(path, to_json(file)); }

void require_fingerprint(const SplitFile& file, std::string_view dataset_fingerprint, std::size_t num_rows) {
  if (file.fingerprint_algorithm != kFingerprintAlgorithm) {
    throw Error(ErrorKind::FingerprintMismatch, "unknown fingerprint algorithm '" + file.fingerprint_algorithm + "'");
  }
  if (file.fingerprint != dataset_fingerprint) {
    throw Error(ErrorKind::FingerprintMismatch, "split file was generated for different data (digest " +
                                                    file.fingerprint + ", dataset " + std::string(dataset_fingerprint) +
                                                    ")");
  }
  if (file.num_rows != num_rows) {
    throw Error(ErrorKind::FingerprintMismatch, "split file expects " + std::to_string(file.num_rows) + " rows");
  }
}

}  // namespace qpgm::io
