// core/include/aud/synth.hpp
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

#ifndef AUD_SYNTH_HPP_
#define AUD_SYNTH_HPP_

#include <cstdint>

#include "aud/corpus.hpp"

namespace aud {

// Ground-truth corpus layout for verification: a known unit inventory
// with per-state diagonal Gaussians, topic-dependent unit frequencies,
// and a small lexicon of recurring unit n-grams acting as "words".
struct SynthSpec {
  int n_true_units = 8;
  int states_per_unit = 3;
  int dim = 13;
  int n_utterances = 50;
  double mean_frames_per_state = 5.0;
  double mean_separation = 5.0;  // scale of state-mean draws, unit noise
  int n_topics = 2;
  int docs_per_topic = 10;
  int units_per_utterance = 12;  // sequence length before word insertion
  int n_word_types = 4;
  double word_probability = 0.25;

  void Validate() const;
};

struct SynthCorpus {
  FeatureSet features;
  ReferenceTranscript reference;  // true unit spans, labels "p<k>"
  std::vector<WordSegment> words;
  DocumentSet documents;
  // n_true_units*states_per_unit x dim, for nearest-centroid checks.
  Eigen::MatrixXd state_means;
};

/// Deterministic for a fixed seed.  Reference spans exactly tile every
/// utterance.
SynthCorpus SynthesizeCorpus(const SynthSpec &spec, std::uint64_t seed);

}  // namespace aud

#endif  // AUD_SYNTH_HPP_
