#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qpgm/classifier.hpp"

namespace qpgm::tools {

/// Bad flags or configuration text; maps to the usage exit code.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Training configuration from either inline "key=value" pairs separated by
/// ',' or ';', or a JSON file. A gridsearch report is accepted as JSON too, in
/// which case its chosen configuration is used.
///
/// Keys: encoding, alpha, copies (or n), priors, normalizer, engine,
/// rank_tol, dense_limit. priors is uniform, empirical, or explicit values
/// separated by ':' in class order.
FitOptions parse_train_config(std::string_view text);

/// Worker count from PGM_WORKERS; machine parallelism when unset.
std::size_t workers_from_env();

}  // namespace qpgm::tools
