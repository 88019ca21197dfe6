// core/include/aud/eval_samediff.hpp
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

#ifndef AUD_EVAL_SAMEDIFF_HPP_
#define AUD_EVAL_SAMEDIFF_HPP_

#include "aud/corpus.hpp"
#include "aud/decoder.hpp"

namespace aud {

struct ScoredPair {
  int a = 0;  // segment indices
  int b = 0;
  double distance = 0.0;
  bool same_type = false;
};

/// Keeps word tokens meeting the duration and character-count floors;
/// word_type is the lowercased label.
std::vector<WordSegment> ExtractWordSegments(const ReferenceTranscript &words,
                                             double min_dur_s, int min_chars,
                                             double frame_period_s);

/// KL(p||q) + KL(q||p) in nats after flooring entries at `floor` and
/// renormalizing.
double SymmetricKl(const Eigen::VectorXd &p, const Eigen::VectorXd &q,
                   double floor);

/// DTW with steps {(1,0),(0,1),(1,1)} and symmetric-KL local cost,
/// normalized by the number of nodes on the optimal path.  `band` < 0
/// disables the Sakoe-Chiba constraint.
double DtwDistance(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                   double floor, int band = -1);

/// Ranks pairs by ascending distance (stable in segment-id order) and
/// averages precision at each positive.
double AveragePrecision(std::vector<ScoredPair> pairs);

struct SameDiffResult {
  double average_precision = 0.0;
  long long positives = 0;
  long long total_pairs = 0;
  std::vector<ScoredPair> pairs;
};

SameDiffResult SameDifferentEval(const std::vector<WordSegment> &segments,
                                 const Posteriorgram &postgrams, double floor,
                                 int jobs = 0, int band = -1);

}  // namespace aud

#endif  // AUD_EVAL_SAMEDIFF_HPP_
