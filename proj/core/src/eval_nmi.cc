// core/src/eval_nmi.cc
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

#include "aud/eval_nmi.hpp"

#include <algorithm>
#include <cmath>

namespace aud {

AlignedPairs AlignTokens(const Tokenization &hyp, const ReferenceTranscript &ref) {
  AlignedPairs out;
  for (const auto &utt : hyp.utterances) {
    auto it = ref.tokens.find(utt.utterance_id);
    if (it == ref.tokens.end() || it->second.empty())
      throw ValidationError("no reference tokens for utterance " +
                            utt.utterance_id);
    const auto &ref_toks = it->second;
    for (const auto &tok : utt.tokens) {
      const double center = 0.5 * (tok.start_frame + tok.end_frame);
      // Earlier reference token wins ties via strict improvement.
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < ref_toks.size(); ++r) {
        const double rc = 0.5 * (ref_toks[r].start_frame + ref_toks[r].end_frame);
        const double d = std::abs(center - rc);
        if (d < best_dist) {
          best_dist = d;
          best = r;
        }
      }
      out.pairs.emplace_back(ref_toks[best].label, tok.unit);
      ++out.contingency[ref_toks[best].label][tok.unit];
    }
  }
  return out;
}

NmiResult Nmi(const AlignedPairs &pairs) {
  NmiResult res;
  res.n_pairs = static_cast<int>(pairs.pairs.size());
  if (res.n_pairs < 1) throw ValidationError("NMI needs at least one pair");
  const double n = static_cast<double>(res.n_pairs);

  std::map<int, int> hyp_counts;
  for (const auto &[label, cell] : pairs.contingency)
    for (const auto &[unit, count] : cell) hyp_counts[unit] += count;
  res.n_ref_labels = static_cast<int>(pairs.contingency.size());
  res.n_hyp_units = static_cast<int>(hyp_counts.size());
  if (res.n_ref_labels < 2)
    throw ValidationError(
        "NMI undefined: only one reference label present (H(X) = 0)");

  for (const auto &[label, cell] : pairs.contingency) {
    int ref_count = 0;
    for (const auto &[unit, count] : cell) ref_count += count;
    const double px = ref_count / n;
    res.h_ref -= px * std::log(px);
    for (const auto &[unit, count] : cell) {
      const double pxy = count / n;
      const double py = hyp_counts[unit] / n;
      res.mi += pxy * std::log(pxy / (px * py));
    }
  }
  for (const auto &[unit, count] : hyp_counts) {
    const double py = count / n;
    res.h_hyp -= py * std::log(py);
  }
  res.nmi = std::clamp(res.mi / res.h_ref, 0.0, 1.0);
  return res;
}

}  // namespace aud
