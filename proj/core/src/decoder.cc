// core/src/decoder.cc
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

#include "aud/decoder.hpp"

#include <algorithm>
#include <fstream>

#include "aud/inference.hpp"

namespace aud {

namespace {

Eigen::MatrixXd StateLogliksOf(const Eigen::MatrixXd &comp_ll, int M) {
  const Eigen::Index n = comp_ll.rows(), n_states = comp_ll.cols() / M;
  Eigen::MatrixXd out(n, n_states);
  Eigen::RowVectorXd row(comp_ll.cols());
  for (Eigen::Index t = 0; t < n; ++t) {
    row = comp_ll.row(t);
    for (Eigen::Index j = 0; j < n_states; ++j)
      out(t, j) = LogSumExp(row.data() + j * M, static_cast<std::size_t>(M));
  }
  return out;
}

struct BackPointer {
  int pred = -1;       // predecessor state index, -1 at frame 0
  bool is_entry = false;  // true when the step entered the unit
};

UtteranceTokens ViterbiOne(const UnifiedHmmView &view,
                           const Eigen::MatrixXd &state_ll,
                           const std::string &utt_id) {
  const int T = view.num_units, S = view.states_per_unit;
  const Eigen::Index n = state_ll.rows();
  const int n_states = T * S;

  Eigen::MatrixXd vit(n, n_states);
  std::vector<std::vector<BackPointer>> bp(
      static_cast<std::size_t>(n),
      std::vector<BackPointer>(static_cast<std::size_t>(n_states)));

  vit.row(0).setConstant(kLogZero);
  for (int t = 0; t < T; ++t) {
    vit(0, t * S) = view.entry_logw(t) + state_ll(0, t * S);
    bp[0][static_cast<std::size_t>(t * S)] = {-1, true};
  }

  for (Eigen::Index tau = 0; tau + 1 < n; ++tau) {
    // Best exiting unit; ascending scan with strict improvement keeps
    // the lowest unit id on ties.
    int exit_unit = 0;
    double exit_score = kLogZero;
    for (int t = 0; t < T; ++t) {
      const double s = vit(tau, t * S + S - 1) + view.log_adv(t, S - 1);
      if (s > exit_score) {
        exit_score = s;
        exit_unit = t;
      }
    }
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < S; ++s) {
        const int j = t * S + s;
        const double self_score = vit(tau, j) + view.log_self(t, s);
        double best;
        BackPointer best_bp;
        if (s == 0) {
          const double entry_score = exit_score + view.entry_logw(t);
          const int exit_state = exit_unit * S + S - 1;
          // Candidates ordered by predecessor state index.
          if (exit_state < j) {
            best = entry_score;
            best_bp = {exit_state, true};
            if (self_score > best) {
              best = self_score;
              best_bp = {j, false};
            }
          } else {
            best = self_score;
            best_bp = {j, false};
            if (entry_score > best) {
              best = entry_score;
              best_bp = {exit_state, true};
            }
          }
        } else {
          const double adv_score = vit(tau, j - 1) + view.log_adv(t, s - 1);
          best = adv_score;
          best_bp = {j - 1, false};
          if (self_score > best) {
            best = self_score;
            best_bp = {j, false};
          }
        }
        vit(tau + 1, j) = best + state_ll(tau + 1, j);
        bp[static_cast<std::size_t>(tau + 1)][static_cast<std::size_t>(j)] =
            best_bp;
      }
    }
  }

  int cur = 0;
  double best_final = kLogZero;
  for (int j = 0; j < n_states; ++j) {
    if (vit(n - 1, j) > best_final) {
      best_final = vit(n - 1, j);
      cur = j;
    }
  }
  if (best_final == kLogZero)
    throw NumericError("Viterbi found no finite path for utterance " + utt_id);

  UtteranceTokens out;
  out.utterance_id = utt_id;
  out.frame_states.resize(static_cast<std::size_t>(n));
  std::vector<bool> entry_at(static_cast<std::size_t>(n), false);
  for (Eigen::Index tau = n - 1; tau >= 0; --tau) {
    out.frame_states[static_cast<std::size_t>(tau)] = {cur / S + 1,
                                                       cur % S + 1};
    const BackPointer &p = bp[static_cast<std::size_t>(tau)]
                             [static_cast<std::size_t>(cur)];
    entry_at[static_cast<std::size_t>(tau)] = p.is_entry;
    cur = p.pred;
  }

  int token_start = 0;
  for (Eigen::Index tau = 1; tau <= n; ++tau) {
    if (tau == n || entry_at[static_cast<std::size_t>(tau)]) {
      out.tokens.push_back({out.frame_states[static_cast<std::size_t>(
                                token_start)].first,
                            token_start, static_cast<int>(tau)});
      token_start = static_cast<int>(tau);
    }
  }
  return out;
}

int ParseUnitLabel(const std::string &label, int *state, const std::string &ctx) {
  if (label.size() < 2 || label[0] != 'u')
    throw IoError(ctx + ": bad unit label '" + label + "'");
  std::size_t us = label.find("_s");
  try {
    const int unit = std::stoi(label.substr(1, us == std::string::npos
                                                   ? std::string::npos
                                                   : us - 1));
    if (state != nullptr)
      *state = us == std::string::npos ? 0 : std::stoi(label.substr(us + 2));
    return unit;
  } catch (const std::exception &) {
    throw IoError(ctx + ": bad unit label '" + label + "'");
  }
}

}  // namespace

Tokenization ViterbiTokenize(const PhoneLoopModel &model, const FeatureSet &fs,
                             int jobs) {
  fs.Validate();
  if (fs.utterances.empty())
    throw ValidationError("cannot tokenize an empty feature set");
  if (fs.Dim() != model.config.dim)
    throw ValidationError("feature dim does not match model dim");
  const UnifiedHmmView view = MakeUnifiedView(model);
  const int M = model.config.gaussians_per_state;

  Tokenization tok;
  tok.utterances.resize(fs.utterances.size());
  ParallelChunks(fs.utterances.size(), jobs,
                 [&](std::size_t b, std::size_t e) {
                   for (std::size_t i = b; i < e; ++i) {
                     const auto &u = fs.utterances[i];
                     Eigen::MatrixXd ll = ExpectedFrameLoglik(model, u.features);
                     tok.utterances[i] =
                         ViterbiOne(view, StateLogliksOf(ll, M), u.id);
                   }
                 });
  return tok;
}

Posteriorgram ComputePosteriorgram(const PhoneLoopModel &model,
                                   const FeatureSet &fs, PosteriorLevel level,
                                   int jobs) {
  fs.Validate();
  if (fs.Dim() != model.config.dim)
    throw ValidationError("feature dim does not match model dim");
  const UnifiedHmmView view = MakeUnifiedView(model);
  const int T = model.config.truncation, S = model.config.states_per_unit;
  const int M = model.config.gaussians_per_state;

  Posteriorgram post;
  post.level = level;
  post.utterances.resize(fs.utterances.size());
  ParallelChunks(fs.utterances.size(), jobs, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto &u = fs.utterances[i];
      Eigen::MatrixXd ll = ExpectedFrameLoglik(model, u.features);
      FbResult fb = ForwardBackward(view, ll, M);
      Eigen::MatrixXd p;
      if (level == PosteriorLevel::kState) {
        p = std::move(fb.gamma);
      } else {
        p.resize(fb.gamma.rows(), T);
        for (int t = 0; t < T; ++t)
          p.col(t) = fb.gamma.middleCols(t * S, S).rowwise().sum();
      }
      // Counter log-space rounding.
      for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= p.row(r).sum();
      post.utterances[i] = {u.id, std::move(p)};
    }
  });
  return post;
}

std::pair<int, std::map<int, int>> UnitInventory(const Tokenization &tok) {
  std::map<int, int> histogram;
  for (const auto &u : tok.utterances)
    for (const auto &t : u.tokens) ++histogram[t.unit];
  return {static_cast<int>(histogram.size()), histogram};
}

void WriteTokenization(const std::string &path, const Tokenization &tok) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write tokenization: " + path);
  for (const auto &u : tok.utterances)
    for (const auto &t : u.tokens)
      out << u.utterance_id << '\t' << t.start_frame << '\t' << t.end_frame
          << "\tu" << t.unit << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void WriteStateLabels(const std::string &path, const Tokenization &tok) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write state labels: " + path);
  for (const auto &u : tok.utterances) {
    const auto &fsr = u.frame_states;
    std::size_t run_start = 0;
    for (std::size_t f = 1; f <= fsr.size(); ++f) {
      if (f == fsr.size() || fsr[f] != fsr[run_start]) {
        out << u.utterance_id << '\t' << run_start << '\t' << f << "\tu"
            << fsr[run_start].first << "_s" << fsr[run_start].second << '\n';
        run_start = f;
      }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

Tokenization ReadTokenization(const std::string &path) {
  const ReferenceTranscript raw = ReadTranscript(path);
  Tokenization tok;
  for (const auto &[utt, toks] : raw.tokens) {
    UtteranceTokens ut;
    ut.utterance_id = utt;
    bool has_states = true;
    for (const auto &t : toks) {
      int state = 0;
      const int unit = ParseUnitLabel(t.label, &state, path);
      ut.tokens.push_back({unit, t.start_frame, t.end_frame});
      if (state == 0) {
        has_states = false;
      } else if (has_states) {
        if (static_cast<int>(ut.frame_states.size()) < t.end_frame)
          ut.frame_states.resize(static_cast<std::size_t>(t.end_frame),
                                 {0, 0});
        for (int f = t.start_frame; f < t.end_frame; ++f)
          ut.frame_states[static_cast<std::size_t>(f)] = {unit, state};
      }
    }
    if (!has_states) ut.frame_states.clear();
    tok.utterances.push_back(std::move(ut));
  }
  return tok;
}

std::map<std::string, std::vector<int>> FrameStateClasses(
    const Tokenization &tok, int states_per_unit) {
  std::map<std::string, std::vector<int>> classes;
  for (const auto &u : tok.utterances) {
    if (u.frame_states.empty())
      throw ValidationError("tokenization lacks per-frame state labels for " +
                            u.utterance_id);
    std::vector<int> c;
    c.reserve(u.frame_states.size());
    for (const auto &[unit, state] : u.frame_states) {
      if (unit < 1 || state < 1)
        throw ValidationError("incomplete state labels for " + u.utterance_id);
      c.push_back((unit - 1) * states_per_unit + (state - 1));
    }
    classes[u.utterance_id] = std::move(c);
  }
  return classes;
}

}  // namespace aud
