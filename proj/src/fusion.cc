// Copyright 2026 The abusekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "abusekit/fusion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "abusekit/binary_io.hpp"
#include "abusekit/eigen_blob.hpp"
#include "abusekit/error.hpp"

namespace abusekit {
namespace fs = std::filesystem;
using nlohmann::json;

Eigen::VectorXd ZScoreParams::transform(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) {
    throw InvalidArgument("z-score input dim " + std::to_string(x.size()) + " != fitted dim " + std::to_string(dim()));
  }
  return ((x - mean).array() / std.array()).matrix();
}

Eigen::MatrixXd ZScoreParams::transform(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != dim()) {
    throw InvalidArgument("z-score input dim " + std::to_string(rows.cols()) + " != fitted dim " +
                          std::to_string(dim()));
  }
  return (rows.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

ZScoreParams fit_zscore(const Eigen::MatrixXd& train) {
  if (train.rows() < 2) throw InvalidArgument("z-score fit needs at least 2 samples");
  if (!train.allFinite()) throw InvalidArgument("z-score fit input contains non-finite values");
  ZScoreParams p;
  p.mean = train.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train.rowwise() - p.mean.transpose();
  p.std = (centered.array().square().colwise().sum() / static_cast<double>(train.rows())).sqrt().transpose();
  p.std = p.std.cwiseMax(kStdFloor);
  return p;
}

Eigen::VectorXd PCAModel::project(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) {
    throw InvalidArgument("PCA input dim " + std::to_string(x.size()) + " != fitted dim " +
                          std::to_string(input_dim()));
  }
  return components * (x - mean);
}

Eigen::MatrixXd PCAModel::project(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != input_dim()) {
    throw InvalidArgument("PCA input dim " + std::to_string(rows.cols()) + " != fitted dim " +
                          std::to_string(input_dim()));
  }
  return (rows.rowwise() - mean.transpose()) * components.transpose();
}

PCAModel fit_pca(const Eigen::MatrixXd& train, double variance_target) {
  const Eigen::Index n = train.rows();
  const Eigen::Index dim = train.cols();
  if (n < 2) throw InvalidArgument("PCA fit needs at least 2 samples");
  if (dim < 1) throw InvalidArgument("PCA fit needs at least one dimension");
  if (!train.allFinite()) throw InvalidArgument("PCA fit input contains non-finite values");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) throw InvalidArgument("variance target must be in (0, 1]");

  PCAModel model;
  model.mean = train.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");

  // Eigen returns ascending order.
  const Eigen::VectorXd eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  const double total = eigenvalues.sum();
  if (!(total > 0.0)) throw InvalidArgument("PCA input has zero total variance");

  model.explained_variance = eigenvalues;
  model.explained_variance_ratio = eigenvalues / total;

  const Eigen::Index k_max = std::min(n - 1, dim);
  Eigen::Index k = 1;
  double cumulative = model.explained_variance_ratio(0);
  while (cumulative < variance_target && k < k_max) {
    cumulative += model.explained_variance_ratio(k);
    ++k;
  }
  model.k = k;

  model.components = vectors.leftCols(k).transpose();
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::Index arg = 0;
    model.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.components(r, arg) < 0.0) model.components.row(r) *= -1.0;
  }
  return model;
}

Eigen::VectorXd ModalityTransform::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd z = zscore.transform(x);
  return pca ? pca->project(z) : z;
}

Eigen::MatrixXd ModalityTransform::apply(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd z = zscore.transform(rows);
  return pca ? pca->project(z) : z;
}

Eigen::Index FusionModel::fused_dim() const {
  Eigen::Index total = 0;
  for (const auto& m : modalities) total += m.output_dim();
  return total;
}

std::vector<Modality> FusionModel::modality_order() const {
  std::vector<Modality> out;
  for (const auto& m : modalities) out.push_back(m.modality);
  return out;
}

FusionModel fit_fusion(const std::map<Modality, Eigen::MatrixXd>& train, bool use_pca, double variance_target) {
  if (train.empty()) throw InvalidArgument("fusion needs at least one modality");
  FusionModel model;
  model.variance_target = variance_target;
  // std::map orders by enum value: audio, emotion, text.
  for (const auto& [modality, rows] : train) {
    ModalityTransform t;
    t.modality = modality;
    t.zscore = fit_zscore(rows);
    if (use_pca) t.pca = fit_pca(t.zscore.transform(rows), variance_target);
    model.modalities.push_back(std::move(t));
  }
  return model;
}

namespace {

template <typename Input>
const Input& require_modality(const std::map<Modality, Input>& inputs, Modality modality) {
  const auto it = inputs.find(modality);
  if (it == inputs.end()) {
    throw InvalidArgument("fusion input is missing modality '" + std::string(to_string(modality)) + "'");
  }
  return it->second;
}

}  // namespace

Eigen::VectorXd apply_fusion(const FusionModel& model, const std::map<Modality, Eigen::VectorXd>& vectors) {
  Eigen::VectorXd out(model.fused_dim());
  Eigen::Index offset = 0;
  for (const auto& t : model.modalities) {
    const Eigen::VectorXd part = t.apply(require_modality(vectors, t.modality));
    out.segment(offset, part.size()) = part;
    offset += part.size();
  }
  return out;
}

Eigen::MatrixXd apply_fusion(const FusionModel& model, const std::map<Modality, Eigen::MatrixXd>& rows) {
  Eigen::Index n = -1;
  for (const auto& t : model.modalities) {
    const auto& m = require_modality(rows, t.modality);
    if (n >= 0 && m.rows() != n) throw InvalidArgument("fusion inputs disagree on sample count");
    n = m.rows();
  }
  Eigen::MatrixXd out(std::max<Eigen::Index>(n, 0), model.fused_dim());
  Eigen::Index offset = 0;
  for (const auto& t : model.modalities) {
    const Eigen::MatrixXd part = t.apply(rows.at(t.modality));
    out.middleCols(offset, part.cols()) = part;
    offset += part.cols();
  }
  return out;
}

json fusion_to_json(const FusionModel& model) {
  json mods = json::array();
  for (const auto& t : model.modalities) {
    json m = {{"modality", std::string(to_string(t.modality))},
              {"input_dim", t.input_dim()},
              {"mean", to_blob(t.zscore.mean)},
              {"std", to_blob(t.zscore.std)},
              {"use_pca", t.pca.has_value()}};
    if (t.pca) {
      m["k"] = t.pca->k;
      m["pca_mean"] = to_blob(t.pca->mean);
      m["components"] = to_blob(t.pca->components);
      m["explained_variance"] = to_blob(t.pca->explained_variance);
      m["explained_variance_ratio"] = to_blob(t.pca->explained_variance_ratio);
    }
    mods.push_back(std::move(m));
  }
  return {{"format_version", 1}, {"variance_target", model.variance_target}, {"modalities", mods}};
}

FusionModel fusion_from_json(const json& doc) {
  try {
    if (doc.at("format_version").get<int>() != 1) throw ParseError("unsupported fusion format_version");
    FusionModel model;
    model.variance_target = doc.value("variance_target", kDefaultVarianceTarget);
    int last = -1;
    for (const auto& m : doc.at("modalities")) {
      ModalityTransform t;
      t.modality = parse_modality(m.at("modality").get<std::string>());
      if (static_cast<int>(t.modality) <= last) throw ParseError("fusion modalities out of order");
      last = static_cast<int>(t.modality);
      const auto dim = m.at("input_dim").get<Eigen::Index>();
      t.zscore.mean = vector_from_blob(m.at("mean").get<std::string>(), dim);
      t.zscore.std = vector_from_blob(m.at("std").get<std::string>(), dim);
      if (m.at("use_pca").get<bool>()) {
        PCAModel p;
        p.k = m.at("k").get<Eigen::Index>();
        p.mean = vector_from_blob(m.at("pca_mean").get<std::string>(), dim);
        p.components = matrix_from_blob(m.at("components").get<std::string>(), p.k, dim);
        const auto spectrum = static_cast<Eigen::Index>(decode_f64_blob(m.at("explained_variance").get<std::string>()).size());
        p.explained_variance = vector_from_blob(m.at("explained_variance").get<std::string>(), spectrum);
        p.explained_variance_ratio = vector_from_blob(m.at("explained_variance_ratio").get<std::string>(), spectrum);
        t.pca = std::move(p);
      }
      model.modalities.push_back(std::move(t));
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("fusion model: ") + e.what());
  }
}

void save_fusion(const fs::path& path, const FusionModel& model) {
  atomic_write_text(path, fusion_to_json(model).dump(2) + "\n");
}

FusionModel load_fusion(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("fusion model not found: " + path.string());
  try {
    return fusion_from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace abusekit
