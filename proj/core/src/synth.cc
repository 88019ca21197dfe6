// core/src/synth.cc
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

#include "aud/synth.hpp"

#include <cstdio>
#include <random>
#include <set>
#include <tuple>

namespace aud {

void SynthSpec::Validate() const {
  if (n_true_units < 2) throw ValidationError("synth: n_true_units must be >= 2");
  if (states_per_unit < 1)
    throw ValidationError("synth: states_per_unit must be >= 1");
  if (dim < 1) throw ValidationError("synth: dim must be >= 1");
  if (n_utterances < 1) throw ValidationError("synth: n_utterances must be >= 1");
  if (!(mean_frames_per_state >= 1.0))
    throw ValidationError("synth: mean_frames_per_state must be >= 1");
  if (!(mean_separation > 0.0))
    throw ValidationError("synth: mean_separation must be > 0");
  if (n_topics < 1 || docs_per_topic < 1)
    throw ValidationError("synth: need at least one topic and document");
  if (n_utterances < n_topics * docs_per_topic)
    throw ValidationError(
        "synth: n_utterances must be >= n_topics * docs_per_topic");
  if (units_per_utterance < 1)
    throw ValidationError("synth: units_per_utterance must be >= 1");
  if (n_word_types < 1) throw ValidationError("synth: n_word_types must be >= 1");
  if (word_probability < 0.0 || word_probability > 1.0)
    throw ValidationError("synth: word_probability must be in [0, 1]");
}

SynthCorpus SynthesizeCorpus(const SynthSpec &spec, std::uint64_t seed) {
  spec.Validate();
  std::mt19937_64 rng(MixSeed(seed, 0x5f9d));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_int_distribution<int> unit_pick(0, spec.n_true_units - 1);

  const int U = spec.n_true_units, S = spec.states_per_unit, D = spec.dim;

  SynthCorpus corpus;
  corpus.state_means.resize(U * S, D);
  for (int i = 0; i < U * S; ++i)
    for (int d = 0; d < D; ++d)
      corpus.state_means(i, d) = spec.mean_separation * normal(rng);

  // Topic-dependent unit frequencies: each topic strongly prefers the
  // units congruent to it modulo the topic count.
  std::vector<std::vector<double>> topic_unit_cdf(
      static_cast<std::size_t>(spec.n_topics));
  for (int k = 0; k < spec.n_topics; ++k) {
    std::vector<double> w(static_cast<std::size_t>(U));
    double total = 0.0;
    for (int u = 0; u < U; ++u) {
      w[static_cast<std::size_t>(u)] = (u % spec.n_topics == k) ? 9.0 : 1.0;
      total += w[static_cast<std::size_t>(u)];
    }
    double acc = 0.0;
    for (int u = 0; u < U; ++u) {
      acc += w[static_cast<std::size_t>(u)] / total;
      w[static_cast<std::size_t>(u)] = acc;
    }
    topic_unit_cdf[static_cast<std::size_t>(k)] = std::move(w);
  }
  auto sample_topic_unit = [&](int topic) {
    const double r = uniform(rng);
    const auto &cdf = topic_unit_cdf[static_cast<std::size_t>(topic)];
    for (int u = 0; u < U; ++u)
      if (r <= cdf[static_cast<std::size_t>(u)]) return u;
    return U - 1;
  };

  // Word lexicon: distinct recurring unit bigrams/trigrams.
  std::vector<std::vector<int>> lexicon;
  std::set<std::vector<int>> lexicon_set;
  std::uniform_int_distribution<int> word_len(2, 3);
  int guard = 0;
  while (static_cast<int>(lexicon.size()) < spec.n_word_types) {
    std::vector<int> word(static_cast<std::size_t>(word_len(rng)));
    for (auto &u : word) u = unit_pick(rng);
    if (lexicon_set.insert(word).second) lexicon.push_back(std::move(word));
    if (++guard > 10000)
      throw ValidationError("synth: cannot build a distinct word lexicon");
  }
  std::uniform_int_distribution<int> word_pick(0, spec.n_word_types - 1);

  const int n_docs = spec.n_topics * spec.docs_per_topic;
  corpus.documents.documents.resize(static_cast<std::size_t>(n_docs));
  for (int d = 0; d < n_docs; ++d) {
    auto &doc = corpus.documents.documents[static_cast<std::size_t>(d)];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "doc%03d", d);
    doc.doc_id = buf;
    doc.topic = "topic" + std::to_string(d / spec.docs_per_topic);
  }

  std::poisson_distribution<int> extra_frames(spec.mean_frames_per_state - 1.0);

  for (int i = 0; i < spec.n_utterances; ++i) {
    const int doc = i % n_docs;
    const int topic = doc / spec.docs_per_topic;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "utt%04d", i);
    const std::string utt_id = buf;
    corpus.documents.documents[static_cast<std::size_t>(doc)]
        .utterance_ids.push_back(utt_id);
    corpus.features.side_of[utt_id] =
        corpus.documents.documents[static_cast<std::size_t>(doc)].doc_id;

    // Unit sequence with embedded lexicon words.
    std::vector<int> units;
    // (word type, first unit index in `units`, unit count)
    std::vector<std::tuple<int, std::size_t, std::size_t>> word_spans;
    for (int item = 0; item < spec.units_per_utterance; ++item) {
      if (uniform(rng) < spec.word_probability) {
        const int w = word_pick(rng);
        word_spans.emplace_back(w, units.size(),
                                lexicon[static_cast<std::size_t>(w)].size());
        for (int u : lexicon[static_cast<std::size_t>(w)]) units.push_back(u);
      } else {
        units.push_back(sample_topic_unit(topic));
      }
    }

    // Emit frames and record unit spans.
    std::vector<int> unit_start_frame(units.size() + 1, 0);
    std::vector<Eigen::RowVectorXd> rows;
    auto &ref = corpus.reference.tokens[utt_id];
    for (std::size_t ui = 0; ui < units.size(); ++ui) {
      unit_start_frame[ui] = static_cast<int>(rows.size());
      const int u = units[ui];
      for (int s = 0; s < S; ++s) {
        const int frames = 1 + extra_frames(rng);
        for (int f = 0; f < frames; ++f) {
          Eigen::RowVectorXd row(D);
          for (int d = 0; d < D; ++d)
            row(d) = corpus.state_means(u * S + s, d) + normal(rng);
          rows.push_back(std::move(row));
        }
      }
      ref.push_back({"p" + std::to_string(u), unit_start_frame[ui],
                     static_cast<int>(rows.size())});
    }
    unit_start_frame[units.size()] = static_cast<int>(rows.size());

    for (const auto &[w, first_unit, n_units] : word_spans) {
      char wbuf[32];
      std::snprintf(wbuf, sizeof(wbuf), "wordtype%02d", w);
      corpus.words.push_back({utt_id, unit_start_frame[first_unit],
                              unit_start_frame[first_unit + n_units], wbuf});
    }

    Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), D);
    for (std::size_t r = 0; r < rows.size(); ++r)
      features.row(static_cast<Eigen::Index>(r)) = rows[r];
    corpus.features.utterances.push_back({utt_id, std::move(features)});
  }

  corpus.features.frame_period_s = 0.010;
  corpus.features.Validate();
  corpus.documents.Validate(&corpus.features);
  return corpus;
}

}  // namespace aud
