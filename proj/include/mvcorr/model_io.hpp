#pragma once

#include <optional>
#include <string>
#include <variant>

#include "mvcorr/cca.hpp"
#include "mvcorr/kcca.hpp"
#include "mvcorr/lstm.hpp"
#include "mvcorr/mlp.hpp"
#include "mvcorr/splitae.hpp"

namespace mvcorr {

struct BaselineModel {};

struct DccaModel {
  MlpParams net1, net2;
};

struct DcclstmModel {
  std::vector<LstmParams> stack1, stack2;
};

using AnyModel =
    std::variant<BaselineModel, CcaModel, KccaModel, SplitAeModel, DccaModel, DcclstmModel>;

/// MVMDL1 container: method tag, full-precision parameters, the training
/// config echoed as text, and a fingerprint of the training data. Round
/// trips reproduce transforms bit-exactly (all parameters stored as f64).
struct ModelFile {
  std::uint32_t version = 1;
  std::string method;
  AnyModel model;
  std::string config_echo;
  std::uint64_t data_fingerprint = 0;
};

void save_model(const ModelFile& file, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace mvcorr
