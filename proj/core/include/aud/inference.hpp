// core/include/aud/inference.hpp
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

#ifndef AUD_INFERENCE_HPP_
#define AUD_INFERENCE_HPP_

#include <iosfwd>

#include "aud/corpus.hpp"
#include "aud/model.hpp"

namespace aud {

// Expected counts and moments for every conjugate update; element-wise
// addition makes stats mergeable across utterances and workers.
struct SufficientStats {
  Eigen::VectorXd unit_entry;   // T expected entry counts
  Eigen::MatrixXd trans_self;   // T x S expected self-loop counts
  Eigen::MatrixXd trans_adv;    // T x S expected advance/exit counts
  Eigen::MatrixXd comp_occ;     // (T*S) x M expected occupancies N
  Eigen::MatrixXd s1;           // (T*S*M) x dim, sum of post * x
  Eigen::MatrixXd s2;           // (T*S*M) x dim, sum of post * x^2
  double log_evidence = 0.0;
  double n_frames = 0.0;

  static SufficientStats Zeros(const PhoneLoopModel &model, int dim);
  void MergeFrom(const SufficientStats &other);
};

SufficientStats MergeStats(const SufficientStats &a, const SufficientStats &b);

// Posteriors from one forward-backward pass over an utterance.
struct FbResult {
  Eigen::MatrixXd gamma;       // n x (T*S) state posteriors
  Eigen::MatrixXd comp_post;   // n x (T*S*M) component posteriors
  Eigen::VectorXd unit_entry;  // T expected entry counts
  Eigen::MatrixXd xi_self;     // T x S
  Eigen::MatrixXd xi_adv;      // T x S (last state: exit count)
  double log_evidence = 0.0;
};

/// Log-space forward-backward over the unified phone-loop HMM.
/// frame_logliks is n x (T*S*M) as produced by ExpectedFrameLoglik;
/// gaussians_per_state tells the pass how to fold components into states.
FbResult ForwardBackward(const UnifiedHmmView &view,
                         const Eigen::MatrixXd &frame_logliks,
                         int gaussians_per_state);

/// Folds one utterance's posteriors and frames into `into`.
void AccumulateStats(const FbResult &fb, const Eigen::MatrixXd &frames,
                     SufficientStats *into);

/// Conjugate posterior updates from accumulated stats; components with
/// zero occupancy stay at their prior.
PhoneLoopModel MStep(const PhoneLoopModel &model, const SufficientStats &stats);

/// Sum of closed-form KL(q || p) over every parameter family.
double KlToPrior(const PhoneLoopModel &model);

/// ELBO = expected-parameter log-evidence minus parameter KL terms.
double Elbo(const PhoneLoopModel &model, double total_log_evidence);

struct TrainOptions {
  int n_iters = 10;
  int jobs = 0;  // <= 0: hardware concurrency
};

struct TrainReport {
  std::vector<double> elbo;
  std::vector<double> seconds;
  PhoneLoopModel model;
};

/// Runs the E-step over all utterances in parallel and merges the
/// per-chunk stats in utterance order.
SufficientStats EStep(const PhoneLoopModel &model, const FeatureSet &fs,
                      int jobs);

/// n_iters rounds of E-step / M-step coordinate ascent.  Each iteration
/// logs `iter<TAB>elbo<TAB>seconds` to `log` when given.  The reported
/// ELBO of iteration i is evaluated at the model entering the iteration.
TrainReport TrainVb(PhoneLoopModel model, const FeatureSet &fs,
                    const TrainOptions &opts, std::ostream *log = nullptr);

}  // namespace aud

#endif  // AUD_INFERENCE_HPP_
