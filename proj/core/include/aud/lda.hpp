// core/include/aud/lda.hpp
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

#ifndef AUD_LDA_HPP_
#define AUD_LDA_HPP_

#include <map>

#include "aud/corpus.hpp"
#include "aud/inference.hpp"
#include "aud/model.hpp"

namespace aud {

// Fisher discriminant projection.  Rows of `projection` are the top
// generalized eigenvectors, scaled so the projected within-class
// covariance is the identity.
struct LdaTransform {
  Eigen::VectorXd input_mean;
  Eigen::MatrixXd projection;   // dim_out x dim_in
  int class_count = 0;
  Eigen::VectorXd eigenvalues;  // descending
};

/// Estimates the transform from per-frame class labels.  ridge < 0
/// selects the default 1e-4 * trace(S_w) / dim_in.
LdaTransform EstimateLda(const FeatureSet &spliced,
                         const std::map<std::string, std::vector<int>> &labels,
                         int dim_out, double ridge = -1.0);

/// projection * (x - input_mean), per frame.
FeatureSet ApplyLda(const LdaTransform &t, const FeatureSet &fs);

void SaveLdaTransform(const std::string &path, const LdaTransform &t);
LdaTransform LoadLdaTransform(const std::string &path);

/// Runs the first-pass model's E-step on fs_first but pairs the latent
/// posteriors with fs_second's frames for the Gaussian moments, so the
/// returned stats can seed the first M-step of a model over the new
/// feature space.  Discrete counts carry over unchanged.
SufficientStats TransferStats(const PhoneLoopModel &first_pass,
                              const FeatureSet &fs_first,
                              const FeatureSet &fs_second, int jobs = 0);

}  // namespace aud

#endif  // AUD_LDA_HPP_
