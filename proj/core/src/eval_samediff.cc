// core/src/eval_samediff.cc
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

#include "aud/eval_samediff.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace aud {

std::vector<WordSegment> ExtractWordSegments(const ReferenceTranscript &words,
                                             double min_dur_s, int min_chars,
                                             double frame_period_s) {
  std::vector<WordSegment> out;
  for (const auto &[utt, toks] : words.tokens) {
    for (const auto &t : toks) {
      const double dur = (t.end_frame - t.start_frame) * frame_period_s;
      if (dur < min_dur_s) continue;
      if (static_cast<int>(t.label.size()) < min_chars) continue;
      std::string type = t.label;
      std::transform(type.begin(), type.end(), type.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      out.push_back({utt, t.start_frame, t.end_frame, std::move(type)});
    }
  }
  return out;
}

double SymmetricKl(const Eigen::VectorXd &p, const Eigen::VectorXd &q,
                   double floor) {
  if (p.size() != q.size())
    throw ValidationError("symmetric KL: length mismatch");
  Eigen::ArrayXd pf = p.array().max(floor);
  Eigen::ArrayXd qf = q.array().max(floor);
  pf /= pf.sum();
  qf /= qf.sum();
  // (p-q) and (log p - log q) negate exactly under argument swap, so the
  // product and sum are bitwise symmetric in (p, q).
  return ((pf - qf) * (pf.log() - qf.log())).sum();
}

double DtwDistance(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                   double floor, int band) {
  if (a.cols() != b.cols())
    throw ValidationError("DTW: posterior dimension mismatch");
  const Eigen::Index na = a.rows(), nb = b.rows();
  if (na < 1 || nb < 1) throw ValidationError("DTW: empty segment");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Lexicographic (cost, node count) DP keeps the result symmetric:
  // both components are symmetric over the path set.
  Eigen::MatrixXd cost(na, nb);
  Eigen::MatrixXi length(na, nb);
  cost.setConstant(kInf);
  length.setZero();

  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < nb; ++j) {
      if (band >= 0 && std::abs(static_cast<long long>(i) - j) > band) continue;
      const double local = SymmetricKl(a.row(i).transpose(),
                                       b.row(j).transpose(), floor);
      if (i == 0 && j == 0) {
        cost(0, 0) = local;
        length(0, 0) = 1;
        continue;
      }
      double best_cost = kInf;
      int best_len = 0;
      auto consider = [&](Eigen::Index pi, Eigen::Index pj) {
        if (pi < 0 || pj < 0 || cost(pi, pj) == kInf) return;
        const double c = cost(pi, pj);
        const int l = length(pi, pj);
        if (c < best_cost || (c == best_cost && l < best_len)) {
          best_cost = c;
          best_len = l;
        }
      };
      consider(i - 1, j - 1);
      consider(i - 1, j);
      consider(i, j - 1);
      if (best_cost == kInf) continue;  // outside the band
      cost(i, j) = best_cost + local;
      length(i, j) = best_len + 1;
    }
  }
  if (cost(na - 1, nb - 1) == kInf)
    throw ValidationError("DTW: band too narrow for segment lengths");
  return cost(na - 1, nb - 1) / length(na - 1, nb - 1);
}

double AveragePrecision(std::vector<ScoredPair> pairs) {
  long long positives = 0;
  for (const auto &p : pairs) positives += p.same_type ? 1 : 0;
  if (positives == 0)
    throw ValidationError("average precision undefined: no same-type pairs");

  std::sort(pairs.begin(), pairs.end(), [](const ScoredPair &x,
                                           const ScoredPair &y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  double ap = 0.0;
  long long seen_pos = 0;
  for (std::size_t rank = 0; rank < pairs.size(); ++rank) {
    if (pairs[rank].same_type) {
      ++seen_pos;
      ap += static_cast<double>(seen_pos) / static_cast<double>(rank + 1);
    }
  }
  return ap / static_cast<double>(positives);
}

SameDiffResult SameDifferentEval(const std::vector<WordSegment> &segments,
                                 const Posteriorgram &postgrams, double floor,
                                 int jobs, int band) {
  // Slice each segment out of its utterance's posteriorgram up front.
  std::vector<Eigen::MatrixXd> slices(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto &seg = segments[i];
    const Posteriorgram::Utterance *utt = nullptr;
    for (const auto &u : postgrams.utterances)
      if (u.id == seg.utterance_id) {
        utt = &u;
        break;
      }
    if (utt == nullptr)
      throw ValidationError("no posteriorgram for utterance " +
                            seg.utterance_id);
    if (seg.start_frame < 0 || seg.end_frame > utt->posteriors.rows() ||
        seg.end_frame <= seg.start_frame)
      throw ValidationError("segment out of posteriorgram bounds in " +
                            seg.utterance_id);
    slices[i] = utt->posteriors.middleRows(seg.start_frame,
                                           seg.end_frame - seg.start_frame);
  }

  const std::size_t n = segments.size();
  const std::size_t n_pairs = n * (n - 1) / 2;
  SameDiffResult res;
  res.pairs.resize(n_pairs);

  ParallelChunks(n_pairs, jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      // Unrank k into the (a, b) upper-triangle pair, a < b.
      std::size_t a = 0, row_end = n - 1;
      std::size_t kk = k;
      while (kk >= row_end) {
        kk -= row_end;
        ++a;
        --row_end;
      }
      const std::size_t b = a + 1 + kk;
      ScoredPair &p = res.pairs[k];
      p.a = static_cast<int>(a);
      p.b = static_cast<int>(b);
      p.distance = DtwDistance(slices[a], slices[b], floor, band);
      p.same_type = segments[a].word_type == segments[b].word_type;
    }
  });

  res.total_pairs = static_cast<long long>(n_pairs);
  for (const auto &p : res.pairs) res.positives += p.same_type ? 1 : 0;
  res.average_precision = AveragePrecision(res.pairs);
  return res;
}

}  // namespace aud
