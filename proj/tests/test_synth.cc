// tests/test_synth.cc
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

#include "doctest.h"

#include "aud/synth.hpp"

using namespace aud;

TEST_CASE("synth corpus is deterministic per seed") {
  SynthSpec spec;
  spec.n_utterances = 20;
  SynthCorpus a = SynthesizeCorpus(spec, 9);
  SynthCorpus b = SynthesizeCorpus(spec, 9);
  SynthCorpus c = SynthesizeCorpus(spec, 10);
  REQUIRE(a.features.utterances.size() == b.features.utterances.size());
  for (std::size_t i = 0; i < a.features.utterances.size(); ++i)
    CHECK((a.features.utterances[i].features -
           b.features.utterances[i].features)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  CHECK((a.features.utterances[0].features -
         c.features.utterances[0].features)
            .cwiseAbs()
            .maxCoeff() > 0.0);
}

TEST_CASE("synth reference spans tile every utterance") {
  SynthSpec spec;
  spec.n_utterances = 25;
  SynthCorpus corpus = SynthesizeCorpus(spec, 3);
  for (const auto &u : corpus.features.utterances) {
    const auto &ref = corpus.reference.tokens.at(u.id);
    REQUIRE(!ref.empty());
    CHECK(ref.front().start_frame == 0);
    CHECK(ref.back().end_frame == u.features.rows());
    for (std::size_t i = 1; i < ref.size(); ++i)
      CHECK(ref[i].start_frame == ref[i - 1].end_frame);
  }
}

TEST_CASE("synth word segments stay in bounds with lexicon labels") {
  SynthSpec spec;
  spec.n_utterances = 30;
  spec.word_probability = 0.5;
  SynthCorpus corpus = SynthesizeCorpus(spec, 5);
  CHECK(!corpus.words.empty());
  for (const auto &w : corpus.words) {
    const auto *u = corpus.features.Find(w.utterance_id);
    REQUIRE(u != nullptr);
    CHECK(w.start_frame >= 0);
    CHECK(w.start_frame < w.end_frame);
    CHECK(w.end_frame <= u->features.rows());
    CHECK(w.word_type.rfind("wordtype", 0) == 0);
  }
}

TEST_CASE("synth documents cover the topics and all their utterances") {
  SynthSpec spec;
  spec.n_utterances = 40;
  spec.n_topics = 2;
  spec.docs_per_topic = 10;
  SynthCorpus corpus = SynthesizeCorpus(spec, 7);
  REQUIRE(corpus.documents.documents.size() == 20);
  std::size_t covered = 0;
  for (const auto &d : corpus.documents.documents) {
    CHECK(!d.topic.empty());
    CHECK(!d.utterance_ids.empty());
    covered += d.utterance_ids.size();
  }
  CHECK(covered == corpus.features.utterances.size());
}

TEST_CASE("synth rejects inconsistent specs") {
  SynthSpec spec;
  spec.n_utterances = 5;
  spec.n_topics = 2;
  spec.docs_per_topic = 10;
  CHECK_THROWS_AS(SynthesizeCorpus(spec, 1), ValidationError);
}
