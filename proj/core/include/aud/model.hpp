// core/include/aud/model.hpp
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

#ifndef AUD_MODEL_HPP_
#define AUD_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aud/common.hpp"

namespace aud {

// Conjugate prior/posterior over a diagonal Gaussian: per-dimension
// Normal-Gamma with shared scale kappa and shape a, per-dimension mean
// and rate.
struct NormalGammaParams {
  Eigen::VectorXd mean;
  double kappa = 1.0;
  double shape = 1.0;
  Eigen::VectorXd rate;
};

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

struct ModelConfig {
  int truncation = 200;          // max number of units T
  int states_per_unit = 3;       // left-to-right emission states S
  int gaussians_per_state = 2;   // mixture components M
  int dim = 0;
  double stick_concentration = 1.0;    // Beta(1, gamma) stick prior
  double dirichlet_prior_weight = 1.0; // per outcome, transitions and weights
  NormalGammaParams normal_gamma_prior;

  void Validate() const;
  /// Weak data-scaled prior: m0 = global mean, b0 = global per-dimension
  /// variance, kappa0 = a0 = 1.
  static ModelConfig Defaults(int truncation, int states_per_unit,
                              int gaussians_per_state,
                              const Eigen::VectorXd &data_mean,
                              const Eigen::VectorXd &data_var);
};

// Truncated-DP phone loop of Bayesian GMM-HMMs.  Priors live in config;
// all posterior parameters below.  Component c of state s of unit t is
// flattened as (t * S + s) * M + c.
struct PhoneLoopModel {
  ModelConfig config;
  std::vector<BetaParams> stick;    // T-1 stick posteriors; v_{T-1} == 1
  Eigen::MatrixXd trans_self;       // T x S Dirichlet pseudo-counts
  Eigen::MatrixXd trans_adv;        // T x S
  Eigen::MatrixXd gmm_weight;       // (T*S) x M Dirichlet pseudo-counts
  std::vector<NormalGammaParams> gaussians;  // T*S*M

  int NumUnits() const { return config.truncation; }
  int NumStates() const { return config.truncation * config.states_per_unit; }
  int NumComponents() const {
    return NumStates() * config.gaussians_per_state;
  }
  void Validate() const;
};

// Expected-log parameters of the single unified HMM the phone loop
// forms: per-unit entry weights plus left-to-right self/advance terms.
// The advance term of each unit's final state is its exit weight.
struct UnifiedHmmView {
  int num_units = 0;
  int states_per_unit = 0;
  Eigen::VectorXd entry_logw;   // T, E[log pi_t]
  Eigen::MatrixXd log_self;     // T x S
  Eigen::MatrixXd log_adv;      // T x S
};

PhoneLoopModel InitModel(const ModelConfig &cfg, std::uint64_t seed);

/// E[log pi_t] under the stick-breaking posterior, with the last stick
/// variable fixed to 1 so the truncation remainder goes to unit T-1.
Eigen::VectorXd ExpectedLogWeights(const PhoneLoopModel &model);

UnifiedHmmView MakeUnifiedView(const PhoneLoopModel &model);

/// Expected log joint density of each frame under every mixture
/// component, n x (T*S*M); includes the E[log w_m] mixture weight term.
Eigen::MatrixXd ExpectedFrameLoglik(const PhoneLoopModel &model,
                                    const Eigen::MatrixXd &frames);

// Versioned structured-text (JSON) model files; numbers round-trip
// exactly so decode output is preserved bit for bit.
void SaveModel(const std::string &path, const PhoneLoopModel &model);
PhoneLoopModel LoadModel(const std::string &path);

}  // namespace aud

#endif  // AUD_MODEL_HPP_
