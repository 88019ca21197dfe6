// core/include/aud/corpus.hpp
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

#ifndef AUD_CORPUS_HPP_
#define AUD_CORPUS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aud/common.hpp"

namespace aud {

// A set of named utterances sharing one feature dimension.  Immutable by
// convention once built; all transforms below return a new set.
struct FeatureSet {
  struct Utterance {
    std::string id;
    Eigen::MatrixXd features;  // frames x dim
  };

  std::vector<Utterance> utterances;
  double frame_period_s = 0.010;
  // Grouping key for per-side CMVN; utterances absent from the map form
  // their own singleton side.
  std::map<std::string, std::string> side_of;

  int Dim() const;
  std::size_t TotalFrames() const;
  const Utterance *Find(const std::string &utt_id) const;
  std::string SideOf(const std::string &utt_id) const;
  void Validate() const;
};

struct RefToken {
  std::string label;
  int start_frame = 0;
  int end_frame = 0;
};

struct ReferenceTranscript {
  // Tokens are time-ordered and non-overlapping within an utterance.
  std::map<std::string, std::vector<RefToken>> tokens;
  void Validate() const;
};

struct WordSegment {
  std::string utterance_id;
  int start_frame = 0;
  int end_frame = 0;
  std::string word_type;
};

struct Document {
  std::string doc_id;
  std::string topic;  // empty string = unlabeled
  std::vector<std::string> utterance_ids;
};

struct DocumentSet {
  std::vector<Document> documents;
  void Validate(const FeatureSet *fs = nullptr) const;
};

// FEAT1 binary archive: magic "AUDF", u32 version=1, u32 count, then per
// utterance {u32 id_len, id bytes, u32 frames, u32 dim, float32 row-major
// data}, all little-endian.  Parse errors name the byte offset.
FeatureSet ReadFeatureArchive(const std::string &path);
void WriteFeatureArchive(const std::string &path, const FeatureSet &fs);

// Tab-separated token file: utt_id \t start_frame \t end_frame \t label.
ReferenceTranscript ReadTranscript(const std::string &path);
void WriteTranscript(const std::string &path, const ReferenceTranscript &ref);

std::vector<WordSegment> ReadWordSegments(const std::string &path);
void WriteWordSegments(const std::string &path,
                       const std::vector<WordSegment> &segments);

// Document file: doc_id \t topic_or_- \t utt1,utt2,...
DocumentSet ReadDocuments(const std::string &path);
void WriteDocuments(const std::string &path, const DocumentSet &docs);

// Side map: utt_id \t side_id.
std::map<std::string, std::string> ReadSideMap(const std::string &path);
void WriteSideMap(const std::string &path,
                  const std::map<std::string, std::string> &sides);

/// Per-side, per-dimension mean/variance normalization (population
/// variance).  Zero-variance dimensions are mean-shifted only, with the
/// divisor clamped at 1e-8 and a warning recorded.
FeatureSet ApplyCmvn(const FeatureSet &fs,
                     std::vector<std::string> *warnings = nullptr);

/// Stacks rows t-context .. t+context per frame with edge replication.
Eigen::MatrixXd SpliceFrames(const Eigen::MatrixXd &features, int context);
FeatureSet SpliceFeatures(const FeatureSet &fs, int context);

}  // namespace aud

#endif  // AUD_CORPUS_HPP_
