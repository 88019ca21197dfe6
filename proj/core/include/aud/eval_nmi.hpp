// core/include/aud/eval_nmi.hpp
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

#ifndef AUD_EVAL_NMI_HPP_
#define AUD_EVAL_NMI_HPP_

#include <map>

#include "aud/corpus.hpp"
#include "aud/decoder.hpp"

namespace aud {

// One (reference label, hypothesis unit) pair per hypothesis token,
// plus the resulting contingency table.
struct AlignedPairs {
  std::vector<std::pair<std::string, int>> pairs;
  std::map<std::string, std::map<int, int>> contingency;  // ref -> unit -> n
};

/// Assigns each hypothesis token to the reference token with the
/// nearest center frame; center ties go to the earlier reference token.
AlignedPairs AlignTokens(const Tokenization &hyp, const ReferenceTranscript &ref);

struct NmiResult {
  double mi = 0.0;      // nats
  double h_ref = 0.0;   // nats
  double h_hyp = 0.0;   // nats
  double nmi = 0.0;     // mi / h_ref, clamped to [0, 1]
  int n_pairs = 0;
  int n_hyp_units = 0;
  int n_ref_labels = 0;
};

/// Plug-in mutual information over the contingency table, normalized by
/// the reference entropy.
NmiResult Nmi(const AlignedPairs &pairs);

}  // namespace aud

#endif  // AUD_EVAL_NMI_HPP_
