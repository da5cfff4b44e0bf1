#include "qpgm/tools/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qpgm/error.hpp"
#include "qpgm/format.hpp"
#include "qpgm/io/dataset.hpp"
#include "qpgm/tools/cli.hpp"

namespace qpgm::tools {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  const double v = parse_double(value);
  if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw UsageError(std::string(key) + " must be a positive integer, got '" + std::string(value) + "'");
  }
  return static_cast<std::size_t>(v);
}

void set_priors(FitOptions& opts, std::string_view value) {
  if (value == "uniform" || value == "empirical") {
    opts.priors = parse_prior_mode(value);
    return;
  }
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto end = std::min(value.find(':', start), value.size());
    values.push_back(parse_double(trim(value.substr(start, end - start))));
    start = end + 1;
  }
  opts.priors = PriorMode::Explicit;
  opts.explicit_priors = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void set_key(FitOptions& opts, const std::string& key, const std::string& value) {
  if (key == "encoding") {
    opts.encoding.kind = parse_encoding(value);
  } else if (key == "alpha" || key == "rescale") {
    opts.encoding.rescale_alpha = parse_double(value);
  } else if (key == "copies" || key == "n") {
    opts.copies = parse_count(key, value);
  } else if (key == "priors") {
    set_priors(opts, value);
  } else if (key == "normalizer") {
    opts.encoding.normalizer = parse_normalizer(value);
  } else if (key == "engine") {
    opts.engine = parse_engine(value);
  } else if (key == "rank_tol") {
    opts.rank_tol = parse_double(value);
  } else if (key == "dense_limit") {
    opts.dense_limit = parse_count(key, value);
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  throw UsageError("config values must be strings or numbers");
}

FitOptions from_json(const nlohmann::json& root) {
  FitOptions opts;
  nlohmann::json cfg = root;
  if (root.contains("selection")) {
    cfg = root.at("selection").at("chosen");
    if (root.contains("echo") && root.at("echo").contains("normalizer")) {
      cfg["normalizer"] = root.at("echo").at("normalizer");
    }
  }
  if (!cfg.is_object()) throw UsageError("config JSON must be an object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;  // human-readable label in reports
    if (key == "priors" && value.is_array()) {
      std::string joined;
      for (const auto& p : value) joined += (joined.empty() ? "" : ":") + json_scalar(p);
      set_key(opts, key, joined);
      continue;
    }
    set_key(opts, key, json_scalar(value));
  }
  return opts;
}

}  // namespace

FitOptions parse_train_config(std::string_view text) {
  try {
    const std::string t = trim(text);
    if (t.empty()) throw UsageError("empty --config");
    if (t.find('=') == std::string::npos) {
      const std::filesystem::path path(t);
      if (!std::filesystem::exists(path)) throw UsageError("config file not found: " + t);
      FitOptions opts = from_json(nlohmann::json::parse(io::read_file(path)));
      opts.encoding.validate();
      return opts;
    }
    FitOptions opts;
    std::size_t start = 0;
    while (start < t.size()) {
      auto end = t.find_first_of(",;", start);
      if (end == std::string::npos) end = t.size();
      const std::string item = trim(std::string_view(t).substr(start, end - start));
      start = end + 1;
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("config item '" + item + "' is not key=value");
      set_key(opts, trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
    opts.encoding.validate();
    return opts;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

std::size_t workers_from_env() {
  const char* raw = std::getenv(kWorkersEnv);
  if (raw == nullptr || *raw == '\0') return std::max(1u, std::thread::hardware_concurrency());
  try {
    const double v = parse_double(raw);
    if (v >= 1.0 && v == static_cast<double>(static_cast<std::size_t>(v))) return static_cast<std::size_t>(v);
  } catch (const Error&) {
  }
  throw UsageError(std::string(kWorkersEnv) + " must be a positive integer, got '" + raw + "'");
}

}  // namespace qpgm::tools
