// core/include/aud/decoder.hpp
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

#ifndef AUD_DECODER_HPP_
#define AUD_DECODER_HPP_

#include <map>

#include "aud/corpus.hpp"
#include "aud/model.hpp"

namespace aud {

// 1-best segmentation of an utterance into unit tokens, plus the
// underlying per-frame (unit, state) labels.  Unit ids and state
// indices are 1-based.
struct UnitToken {
  int unit = 0;
  int start_frame = 0;
  int end_frame = 0;
};

struct UtteranceTokens {
  std::string utterance_id;
  std::vector<UnitToken> tokens;
  // One (unit, state) pair per frame; tokens and frame labels describe
  // the same Viterbi path.
  std::vector<std::pair<int, int>> frame_states;
};

struct Tokenization {
  std::vector<UtteranceTokens> utterances;
};

enum class PosteriorLevel { kUnit, kState };

struct Posteriorgram {
  struct Utterance {
    std::string id;
    Eigen::MatrixXd posteriors;  // n x T or n x (T*S), rows sum to 1
  };
  PosteriorLevel level = PosteriorLevel::kUnit;
  std::vector<Utterance> utterances;
};

/// Maximum-expected-log-probability path through the unified HMM,
/// segmented at unit entries.  Score ties prefer the lower unit id,
/// then the lower state index.
Tokenization ViterbiTokenize(const PhoneLoopModel &model, const FeatureSet &fs,
                             int jobs = 0);

/// Forward-backward per-frame posteriors; unit level folds each unit's
/// states.  Rows are renormalized against log-space rounding.
Posteriorgram ComputePosteriorgram(const PhoneLoopModel &model,
                                   const FeatureSet &fs, PosteriorLevel level,
                                   int jobs = 0);

/// (number of distinct units used, token count per unit id).
std::pair<int, std::map<int, int>> UnitInventory(const Tokenization &tok);

// Transcript-format tokenization files: unit tokens labeled "u<id>",
// per-frame state runs labeled "u<id>_s<state>".
void WriteTokenization(const std::string &path, const Tokenization &tok);
void WriteStateLabels(const std::string &path, const Tokenization &tok);
Tokenization ReadTokenization(const std::string &path);

/// Per-frame state class ids (0-based, unit*S+state) for LDA training.
std::map<std::string, std::vector<int>> FrameStateClasses(
    const Tokenization &tok, int states_per_unit);

}  // namespace aud

#endif  // AUD_DECODER_HPP_
