// core/src/model.cc
//
// Copyright 2026  audkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aud/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace aud {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr int kModelFormatVersion = 1;
}  // namespace

void ModelConfig::Validate() const {
  if (truncation < 1) throw ValidationError("truncation must be >= 1");
  if (states_per_unit < 1)
    throw ValidationError("states_per_unit must be >= 1");
  if (gaussians_per_state < 1)
    throw ValidationError("gaussians_per_state must be >= 1");
  if (dim < 1) throw ValidationError("dim must be >= 1");
  if (!(stick_concentration > 0.0))
    throw ValidationError("stick_concentration must be > 0");
  if (!(dirichlet_prior_weight > 0.0))
    throw ValidationError("dirichlet_prior_weight must be > 0");
  const auto &ng = normal_gamma_prior;
  if (ng.mean.size() != dim || ng.rate.size() != dim)
    throw ValidationError("normal-gamma prior vectors must have length dim");
  if (!(ng.kappa > 0.0) || !(ng.shape > 0.0))
    throw ValidationError("normal-gamma kappa and shape must be > 0");
  if (!(ng.rate.minCoeff() > 0.0))
    throw ValidationError("normal-gamma rate must be > 0 in every dimension");
}

ModelConfig ModelConfig::Defaults(int truncation, int states_per_unit,
                                  int gaussians_per_state,
                                  const Eigen::VectorXd &data_mean,
                                  const Eigen::VectorXd &data_var) {
  ModelConfig cfg;
  cfg.truncation = truncation;
  cfg.states_per_unit = states_per_unit;
  cfg.gaussians_per_state = gaussians_per_state;
  cfg.dim = static_cast<int>(data_mean.size());
  cfg.normal_gamma_prior.mean = data_mean;
  cfg.normal_gamma_prior.kappa = 1.0;
  cfg.normal_gamma_prior.shape = 1.0;
  cfg.normal_gamma_prior.rate = data_var.cwiseMax(1e-6);
  return cfg;
}

void PhoneLoopModel::Validate() const {
  config.Validate();
  const int T = config.truncation, S = config.states_per_unit;
  const int M = config.gaussians_per_state;
  if (static_cast<int>(stick.size()) != T - 1)
    throw ValidationError("stick posterior count must be T-1");
  for (const auto &s : stick)
    if (!(s.a > 0.0) || !(s.b > 0.0))
      throw ValidationError("stick Beta parameters must be > 0");
  if (trans_self.rows() != T || trans_self.cols() != S ||
      trans_adv.rows() != T || trans_adv.cols() != S)
    throw ValidationError("transition posterior shape mismatch");
  if (!(trans_self.minCoeff() > 0.0) || !(trans_adv.minCoeff() > 0.0))
    throw ValidationError("transition pseudo-counts must be > 0");
  if (gmm_weight.rows() != T * S || gmm_weight.cols() != M)
    throw ValidationError("gmm weight posterior shape mismatch");
  if (!(gmm_weight.minCoeff() > 0.0))
    throw ValidationError("gmm weight pseudo-counts must be > 0");
  if (static_cast<int>(gaussians.size()) != T * S * M)
    throw ValidationError("gaussian posterior count mismatch");
  for (const auto &g : gaussians) {
    if (g.mean.size() != config.dim || g.rate.size() != config.dim)
      throw ValidationError("gaussian posterior dim mismatch");
    if (!(g.kappa > 0.0) || !(g.shape > 0.0) || !(g.rate.minCoeff() > 0.0))
      throw ValidationError("gaussian posterior parameters must be > 0");
  }
}

PhoneLoopModel InitModel(const ModelConfig &cfg, std::uint64_t seed) {
  cfg.Validate();
  const int T = cfg.truncation, S = cfg.states_per_unit;
  const int M = cfg.gaussians_per_state, D = cfg.dim;

  PhoneLoopModel model;
  model.config = cfg;
  model.stick.assign(static_cast<std::size_t>(std::max(0, T - 1)),
                     BetaParams{1.0, cfg.stick_concentration});
  model.trans_self =
      Eigen::MatrixXd::Constant(T, S, cfg.dirichlet_prior_weight);
  model.trans_adv = Eigen::MatrixXd::Constant(T, S, cfg.dirichlet_prior_weight);
  model.gmm_weight =
      Eigen::MatrixXd::Constant(T * S, M, cfg.dirichlet_prior_weight);

  // Posteriors start at the prior except the component means, which are
  // drawn from the prior predictive to break the unit symmetry.
  model.gaussians.resize(static_cast<std::size_t>(T) * S * M);
  std::mt19937_64 rng(MixSeed(seed, 0x6d6f64656c));
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto &prior = cfg.normal_gamma_prior;
  for (auto &g : model.gaussians) {
    g.kappa = prior.kappa;
    g.shape = prior.shape;
    g.rate = prior.rate;
    g.mean.resize(D);
    for (int d = 0; d < D; ++d) {
      std::gamma_distribution<double> gamma_draw(prior.shape,
                                                 1.0 / prior.rate(d));
      double lambda = std::max(gamma_draw(rng), 1e-12);
      g.mean(d) =
          prior.mean(d) + normal(rng) / std::sqrt(prior.kappa * lambda);
    }
  }
  return model;
}

Eigen::VectorXd ExpectedLogWeights(const PhoneLoopModel &model) {
  const int T = model.config.truncation;
  Eigen::VectorXd logw(T);
  double acc = 0.0;  // sum of E[log(1 - v_s)] for s < t
  for (int t = 0; t < T; ++t) {
    if (t < T - 1) {
      const auto &[a, b] = model.stick[static_cast<std::size_t>(t)];
      const double psi_ab = Digamma(a + b);
      logw(t) = acc + Digamma(a) - psi_ab;
      acc += Digamma(b) - psi_ab;
    } else {
      logw(t) = acc;  // v_{T-1} fixed to 1
    }
  }
  return logw;
}

UnifiedHmmView MakeUnifiedView(const PhoneLoopModel &model) {
  const int T = model.config.truncation, S = model.config.states_per_unit;
  UnifiedHmmView view;
  view.num_units = T;
  view.states_per_unit = S;
  view.entry_logw = ExpectedLogWeights(model);
  view.log_self.resize(T, S);
  view.log_adv.resize(T, S);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double total = model.trans_self(t, s) + model.trans_adv(t, s);
      const double psi_total = Digamma(total);
      view.log_self(t, s) = Digamma(model.trans_self(t, s)) - psi_total;
      view.log_adv(t, s) = Digamma(model.trans_adv(t, s)) - psi_total;
    }
  }
  return view;
}

Eigen::MatrixXd ExpectedFrameLoglik(const PhoneLoopModel &model,
                                    const Eigen::MatrixXd &frames) {
  const int D = model.config.dim;
  if (frames.cols() != D)
    throw ValidationError("frame dim " + std::to_string(frames.cols()) +
                          " does not match model dim " + std::to_string(D));
  const int n = static_cast<int>(frames.rows());
  const int n_states = model.NumStates(), M = model.config.gaussians_per_state;

  Eigen::MatrixXd out(n, n_states * M);
  for (int j = 0; j < n_states; ++j) {
    const double weight_norm = Digamma(model.gmm_weight.row(j).sum());
    for (int m = 0; m < M; ++m) {
      const int c = j * M + m;
      const auto &g = model.gaussians[static_cast<std::size_t>(c)];
      const double elog_w = Digamma(model.gmm_weight(j, m)) - weight_norm;
      // Constant part: sum_d (E[log lambda_d] - log 2pi - 1/kappa) / 2.
      double constant = elog_w;
      Eigen::VectorXd elambda(D);
      for (int d = 0; d < D; ++d) {
        constant += 0.5 * (Digamma(g.shape) - std::log(g.rate(d)) - kLog2Pi -
                           1.0 / g.kappa);
        elambda(d) = g.shape / g.rate(d);
      }
      out.col(c) =
          ((frames.rowwise() - g.mean.transpose()).array().square().rowwise() *
           elambda.transpose().array())
              .rowwise()
              .sum()
              .matrix() *
              -0.5 +
          Eigen::VectorXd::Constant(n, constant);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json VectorToJson(const Eigen::VectorXd &v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd VectorFromJson(const json &a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

json MatrixToJson(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    rows.push_back(VectorToJson(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const json &rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::VectorXd row = VectorFromJson(rows[r]);
    if (row.size() != cols) throw IoError("model file: matrix row length mismatch");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

json NormalGammaToJson(const NormalGammaParams &g) {
  return json{{"mean", VectorToJson(g.mean)},
              {"kappa", g.kappa},
              {"shape", g.shape},
              {"rate", VectorToJson(g.rate)}};
}

NormalGammaParams NormalGammaFromJson(const json &j) {
  NormalGammaParams g;
  g.mean = VectorFromJson(j.at("mean"));
  g.kappa = j.at("kappa").get<double>();
  g.shape = j.at("shape").get<double>();
  g.rate = VectorFromJson(j.at("rate"));
  return g;
}

}  // namespace

void SaveModel(const std::string &path, const PhoneLoopModel &model) {
  json j;
  j["format"] = "audkit-phone-loop";
  j["version"] = kModelFormatVersion;
  const auto &cfg = model.config;
  j["config"] = {{"truncation", cfg.truncation},
                 {"states_per_unit", cfg.states_per_unit},
                 {"gaussians_per_state", cfg.gaussians_per_state},
                 {"dim", cfg.dim},
                 {"stick_concentration", cfg.stick_concentration},
                 {"dirichlet_prior_weight", cfg.dirichlet_prior_weight},
                 {"normal_gamma_prior", NormalGammaToJson(cfg.normal_gamma_prior)}};
  json stick = json::array();
  for (const auto &s : model.stick) stick.push_back(json{s.a, s.b});
  j["stick"] = std::move(stick);
  j["trans_self"] = MatrixToJson(model.trans_self);
  j["trans_adv"] = MatrixToJson(model.trans_adv);
  j["gmm_weight"] = MatrixToJson(model.gmm_weight);
  json gaussians = json::array();
  for (const auto &g : model.gaussians) gaussians.push_back(NormalGammaToJson(g));
  j["gaussians"] = std::move(gaussians);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write model file: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

PhoneLoopModel LoadModel(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw IoError("corrupt model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "audkit-phone-loop")
      throw IoError("not a phone-loop model file: " + path);
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw IoError("unsupported model file version " +
                    std::to_string(j.at("version").get<int>()) + " in " + path);
    PhoneLoopModel model;
    const auto &c = j.at("config");
    model.config.truncation = c.at("truncation").get<int>();
    model.config.states_per_unit = c.at("states_per_unit").get<int>();
    model.config.gaussians_per_state = c.at("gaussians_per_state").get<int>();
    model.config.dim = c.at("dim").get<int>();
    model.config.stick_concentration = c.at("stick_concentration").get<double>();
    model.config.dirichlet_prior_weight =
        c.at("dirichlet_prior_weight").get<double>();
    model.config.normal_gamma_prior =
        NormalGammaFromJson(c.at("normal_gamma_prior"));
    for (const auto &s : j.at("stick"))
      model.stick.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
    const int S = model.config.states_per_unit;
    const int M = model.config.gaussians_per_state;
    model.trans_self = MatrixFromJson(j.at("trans_self"), S);
    model.trans_adv = MatrixFromJson(j.at("trans_adv"), S);
    model.gmm_weight = MatrixFromJson(j.at("gmm_weight"), M);
    for (const auto &g : j.at("gaussians"))
      model.gaussians.push_back(NormalGammaFromJson(g));
    model.Validate();
    return model;
  } catch (const json::exception &e) {
    throw IoError("corrupt model file " + path + ": " + e.what());
  }
}

}  // namespace aud
