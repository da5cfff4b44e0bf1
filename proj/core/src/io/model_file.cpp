#include "qpgm/io/model_file.hpp"

#include <json.hpp>

#include "qpgm/error.hpp"
#include "qpgm/io/dataset.hpp"

namespace qpgm::io {

using ojson = nlohmann::ordered_json;

namespace {

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const ojson& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Row-major flat list.
std::vector<double> to_list(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Matrix to_matrix(const ojson& j, Eigen::Index rows, Eigen::Index cols) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
    throw Error(ErrorKind::SchemaMismatch, "matrix payload has " + std::to_string(values.size()) +
                                               " entries, expected " + std::to_string(rows * cols));
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return m;
}

}  // namespace

std::string to_json(const ModelBundle& bundle) {
  const PgmClassifier& model = bundle.model;
  const Preprocessor& pre = model.preprocessor();
  ojson j;
  j["format"] = "qpgm-model";
  j["version"] = kModelFileVersion;
  j["engine"] = to_string(model.engine_kind());
  j["pipeline"] = {"normalize", "rescale", "encode"};
  j["encoding"] = {{"kind", to_string(pre.config.kind)},
                   {"alpha", pre.config.rescale_alpha},
                   {"normalizer", to_string(pre.config.normalizer)}};
  j["normalizer"] = {{"kind", to_string(pre.normalizer.kind)},
                     {"location", to_list(pre.normalizer.location)},
                     {"scale", to_list(pre.normalizer.scale)}};
  j["priors"] = {{"mode", to_string(model.priors().mode)}, {"values", to_list(model.priors().values)}};
  j["copies"] = model.copies();
  j["rank_tol"] = model.rank_tol();
  j["classes"] = bundle.class_names;
  j["features"] = bundle.feature_names;

  ojson payload;
  if (const auto* dense = std::get_if<DensePgmModel>(&model.engine())) {
    payload["state_dim"] = dense->state_dim();
    payload["dim"] = dense->povm().front().dim();
    ojson povm = ojson::array();
    for (const auto& f : dense->povm()) povm.push_back(to_list(f.matrix()));
    payload["povm"] = povm;
  } else {
    const auto& gram = std::get<GramPgmModel>(model.engine()).parts();
    payload["state_dim"] = gram.states.rows();
    payload["num_train"] = gram.states.cols();
    ojson states = ojson::array();
    for (Eigen::Index c = 0; c < gram.states.cols(); ++c) states.push_back(to_list(Vector(gram.states.col(c))));
    payload["states"] = states;
    payload["weights"] = to_list(gram.weights);
    payload["labels"] = gram.labels;
    payload["inv_sqrt"] = to_list(gram.inv_sqrt);
    payload["pinv"] = to_list(gram.pinv);
  }
  j["payload"] = payload;
  return j.dump(1) + "\n";
}

ModelBundle model_from_json(std::string_view text) {
  try {
    const auto j = ojson::parse(text);
    if (j.value("format", "") != "qpgm-model") throw Error(ErrorKind::SchemaMismatch, "not a model file");
    if (j.at("version").get<int>() != kModelFileVersion) {
      throw Error(ErrorKind::SchemaMismatch, "unsupported model file version");
    }
    Preprocessor pre;
    pre.config.kind = parse_encoding(j.at("encoding").at("kind").get<std::string>());
    pre.config.rescale_alpha = j.at("encoding").at("alpha").get<double>();
    pre.config.normalizer = parse_normalizer(j.at("encoding").at("normalizer").get<std::string>());
    pre.config.validate();
    pre.normalizer.kind = parse_normalizer(j.at("normalizer").at("kind").get<std::string>());
    pre.normalizer.location = to_vector(j.at("normalizer").at("location"));
    pre.normalizer.scale = to_vector(j.at("normalizer").at("scale"));
    if (pre.normalizer.location.size() != pre.normalizer.scale.size()) {
      throw Error(ErrorKind::SchemaMismatch, "normalizer location/scale lengths differ");
    }

    Priors priors{parse_prior_mode(j.at("priors").at("mode").get<std::string>()),
                  to_vector(j.at("priors").at("values"))};
    const auto copies = j.at("copies").get<std::size_t>();
    const auto rank_tol = j.at("rank_tol").get<double>();
    auto class_names = j.at("classes").get<std::vector<std::string>>();
    auto feature_names = j.at("features").get<std::vector<std::string>>();
    if (feature_names.size() != pre.feature_dim()) {
      throw Error(ErrorKind::SchemaMismatch, "feature dictionary does not match normalizer");
    }

    const auto& payload = j.at("payload");
    const auto state_dim = payload.at("state_dim").get<Eigen::Index>();
    const EngineKind engine = parse_engine(j.at("engine").get<std::string>());
    if (engine == EngineKind::Dense) {
      const auto dim = payload.at("dim").get<Eigen::Index>();
      std::vector<SymmetricOperator> povm;
      for (const auto& f : payload.at("povm")) povm.emplace_back(to_matrix(f, dim, dim));
      DensePgmModel dense(std::move(povm), copies, static_cast<std::size_t>(state_dim));
      if (dense.num_classes() != class_names.size()) {
        throw Error(ErrorKind::SchemaMismatch, "class dictionary does not match POVM");
      }
      return {PgmClassifier(std::move(pre), std::move(priors), std::move(dense), rank_tol),
              std::move(class_names), std::move(feature_names)};
    }
    if (engine != EngineKind::Gram) throw Error(ErrorKind::SchemaMismatch, "engine must be dense or gram");
    GramPgmModel::Parts parts;
    const auto m = payload.at("num_train").get<Eigen::Index>();
    parts.states.resize(state_dim, m);
    const auto& states = payload.at("states");
    if (static_cast<Eigen::Index>(states.size()) != m) throw Error(ErrorKind::SchemaMismatch, "state count mismatch");
    for (Eigen::Index c = 0; c < m; ++c) {
      const Vector s = to_vector(states[static_cast<std::size_t>(c)]);
      if (s.size() != state_dim) throw Error(ErrorKind::SchemaMismatch, "state dimension mismatch");
      parts.states.col(c) = s;
    }
    parts.weights = to_vector(payload.at("weights"));
    parts.labels = payload.at("labels").get<std::vector<ClassId>>();
    parts.num_classes = class_names.size();
    parts.copies = copies;
    parts.inv_sqrt = to_matrix(payload.at("inv_sqrt"), m, m);
    parts.pinv = to_matrix(payload.at("pinv"), m, m);
    return {PgmClassifier(std::move(pre), std::move(priors), GramPgmModel(std::move(parts)), rank_tol),
            std::move(class_names), std::move(feature_names)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("model file: ") + e.what());
  }
}

ModelBundle load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) { write_file(path, to_json(bundle)); }

}  // namespace qpgm::io
