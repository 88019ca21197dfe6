// core/src/eval_docs.cc
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

#include "aud/eval_docs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace aud {

namespace {

double SparseDot(const std::vector<std::pair<int, double>> &v,
                 const Eigen::VectorXd &dense) {
  double s = 0.0;
  for (const auto &[i, x] : v) s += x * dense(i);
  return s;
}

void SparseAdd(const std::vector<std::pair<int, double>> &v, double scale,
               Eigen::VectorXd *dense) {
  for (const auto &[i, x] : v) (*dense)(i) += scale * x;
}

}  // namespace

DocVectorSet NgramTfidf(const DocumentSet &docs, const Tokenization &tok,
                        int n_lo, int n_hi,
                        std::vector<std::string> *warnings) {
  if (n_lo < 1 || n_lo > n_hi)
    throw ValidationError("ngram orders must satisfy 1 <= n_lo <= n_hi");

  std::map<std::string, std::vector<int>> unit_seq;
  for (const auto &u : tok.utterances) {
    std::vector<int> seq;
    seq.reserve(u.tokens.size());
    for (const auto &t : u.tokens) seq.push_back(t.unit);
    unit_seq[u.utterance_id] = std::move(seq);
  }

  // Per-document raw term counts.
  std::vector<std::map<std::string, double>> counts(docs.documents.size());
  for (std::size_t d = 0; d < docs.documents.size(); ++d) {
    for (const auto &utt : docs.documents[d].utterance_ids) {
      auto it = unit_seq.find(utt);
      if (it == unit_seq.end())
        throw ValidationError("document " + docs.documents[d].doc_id +
                              " references untokenized utterance " + utt);
      const auto &seq = it->second;
      for (int n = n_lo; n <= n_hi; ++n) {
        for (std::size_t start = 0; start + n <= seq.size(); ++start) {
          std::string key = std::to_string(n) + ":";
          for (int g = 0; g < n; ++g)
            key += (g ? "_" : "") + std::to_string(seq[start + g]);
          counts[d][key] += 1.0;
        }
      }
    }
  }

  DocVectorSet out;
  std::map<std::string, int> df;
  for (const auto &c : counts)
    for (const auto &[key, tf] : c) ++df[key];
  int next_id = 0;
  for (const auto &[key, n] : df) out.vocabulary[key] = next_id++;

  const double n_docs = static_cast<double>(docs.documents.size());
  out.vectors.resize(docs.documents.size());
  for (std::size_t d = 0; d < docs.documents.size(); ++d) {
    DocVector &v = out.vectors[d];
    v.doc_id = docs.documents[d].doc_id;
    v.label = docs.documents[d].topic;
    double norm_sq = 0.0;
    for (const auto &[key, tf] : counts[d]) {
      const double idf = std::log(n_docs / df.at(key));
      const double w = tf * idf;
      if (w != 0.0) {
        v.weights.emplace_back(out.vocabulary.at(key), w);
        norm_sq += w * w;
      }
    }
    std::sort(v.weights.begin(), v.weights.end());
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto &[i, w] : v.weights) w *= inv;
    } else if (warnings != nullptr) {
      warnings->push_back("document " + v.doc_id +
                          " has a zero TFIDF vector (left unnormalized)");
    }
  }
  return out;
}

LinearSvmModel TrainSvmSgd(const std::vector<DocVector> &vectors, int dim,
                           const SvmConfig &cfg) {
  std::set<std::string> class_set;
  for (const auto &v : vectors) {
    if (v.label.empty())
      throw ValidationError("SVM training requires labeled vectors");
    class_set.insert(v.label);
  }
  if (class_set.size() < 2)
    throw ValidationError("SVM training needs at least 2 classes");

  LinearSvmModel model;
  model.classes.assign(class_set.begin(), class_set.end());
  const int n_classes = static_cast<int>(model.classes.size());
  model.weights = Eigen::MatrixXd::Zero(n_classes, dim);
  model.bias = Eigen::VectorXd::Zero(n_classes);

  ParallelChunks(static_cast<std::size_t>(n_classes), n_classes,
                 [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      const std::string &positive = model.classes[c];
      Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
      Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);  // applied penalty
      double bias = 0.0, u = 0.0;
      long long t = 0;
      std::mt19937_64 rng(MixSeed(cfg.seed, c));
      std::vector<std::size_t> order(vectors.size());
      std::iota(order.begin(), order.end(), 0);

      for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
          const DocVector &x = vectors[idx];
          const double y = x.label == positive ? 1.0 : -1.0;
          const double eta =
              cfg.eta0 / (1.0 + cfg.eta0 * cfg.lambda_l1 * t);
          ++t;
          const double margin = y * (SparseDot(x.weights, w) + bias);
          if (margin < 1.0) {
            SparseAdd(x.weights, eta * y, &w);
            bias += eta * y;
          }
          // Cumulative L1 penalty, applied lazily to touched features.
          u += cfg.lambda_l1 * eta;
          for (const auto &[i, val] : x.weights) {
            const double z = w(i);
            if (w(i) > 0.0)
              w(i) = std::max(0.0, w(i) - (u + q(i)));
            else if (w(i) < 0.0)
              w(i) = std::min(0.0, w(i) + (u - q(i)));
            q(i) += w(i) - z;
          }
        }
      }
      model.weights.row(c) = w.transpose();
      model.bias(c) = bias;
    }
  });
  return model;
}

std::string SvmPredict(const LinearSvmModel &model, const DocVector &v) {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(model.classes.size()); ++c) {
    const double s =
        SparseDot(v.weights, model.weights.row(c).transpose()) + model.bias(c);
    if (s > best_score) {  // strict: lexicographically first class on ties
      best_score = s;
      best = c;
    }
  }
  return model.classes[static_cast<std::size_t>(best)];
}

double SvmObjective(const LinearSvmModel &model,
                    const std::vector<DocVector> &vectors, double lambda_l1) {
  double obj = 0.0;
  for (int c = 0; c < static_cast<int>(model.classes.size()); ++c) {
    for (const auto &v : vectors) {
      const double y = v.label == model.classes[static_cast<std::size_t>(c)]
                           ? 1.0
                           : -1.0;
      const double margin =
          y * (SparseDot(v.weights, model.weights.row(c).transpose()) +
               model.bias(c));
      obj += std::max(0.0, 1.0 - margin);
    }
    obj += lambda_l1 * model.weights.row(c).cwiseAbs().sum();
  }
  return obj;
}

std::pair<double, double> CrossValidate(const std::vector<DocVector> &vectors,
                                        int dim, int folds,
                                        const SvmConfig &cfg,
                                        std::uint64_t fold_seed) {
  if (folds < 2) throw ValidationError("cross-validation needs folds >= 2");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    by_label[vectors[i].label].push_back(i);
  for (const auto &[label, members] : by_label)
    if (static_cast<int>(members.size()) < folds)
      throw ValidationError("class '" + label + "' has fewer members (" +
                            std::to_string(members.size()) + ") than folds");

  // Stratified assignment: shuffle within each class, deal round-robin.
  std::vector<int> fold_of(vectors.size(), 0);
  std::mt19937_64 rng(MixSeed(fold_seed, 0xf01d));
  for (auto &[label, members] : by_label) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i)
      fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  std::vector<double> accuracy(static_cast<std::size_t>(folds), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<DocVector> train, test;
    for (std::size_t i = 0; i < vectors.size(); ++i)
      (fold_of[i] == f ? test : train).push_back(vectors[i]);
    const LinearSvmModel model = TrainSvmSgd(train, dim, cfg);
    int correct = 0;
    for (const auto &v : test)
      if (SvmPredict(model, v) == v.label) ++correct;
    accuracy[static_cast<std::size_t>(f)] =
        static_cast<double>(correct) / static_cast<double>(test.size());
  }
  const double mean =
      std::accumulate(accuracy.begin(), accuracy.end(), 0.0) / folds;
  double var = 0.0;
  for (double a : accuracy) var += (a - mean) * (a - mean);
  return {mean, std::sqrt(var / folds)};
}

namespace {

struct ClusterState {
  std::vector<std::vector<int>> members;
  std::vector<Eigen::VectorXd> sums;

  double I2() const {
    double s = 0.0;
    for (const auto &sum : sums) s += sum.norm();
    return s;
  }
};

// Spherical 2-means on a subset; returns the two member lists.
std::pair<std::vector<int>, std::vector<int>> Bisect(
    const std::vector<DocVector> &vectors, int dim,
    const std::vector<int> &members, std::mt19937_64 *rng) {
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  std::size_t ia = pick(*rng), ib = pick(*rng);
  while (ib == ia) ib = pick(*rng);

  Eigen::VectorXd ca = Eigen::VectorXd::Zero(dim),
                  cb = Eigen::VectorXd::Zero(dim);
  SparseAdd(vectors[static_cast<std::size_t>(members[ia])].weights, 1.0, &ca);
  SparseAdd(vectors[static_cast<std::size_t>(members[ib])].weights, 1.0, &cb);

  std::vector<int> side(members.size(), 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    const double na = ca.norm(), nb = cb.norm();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto &w = vectors[static_cast<std::size_t>(members[i])].weights;
      const double sa = na > 0 ? SparseDot(w, ca) / na : 0.0;
      const double sb = nb > 0 ? SparseDot(w, cb) / nb : 0.0;
      const int s = sb > sa ? 1 : 0;
      if (s != side[i]) {
        side[i] = s;
        changed = true;
      }
    }
    // Never let a side go empty: flip the weakest member of the other.
    for (int s = 0; s < 2; ++s) {
      if (std::count(side.begin(), side.end(), s) == 0) {
        std::size_t weakest = 0;
        double weakest_sim = std::numeric_limits<double>::infinity();
        const Eigen::VectorXd &other = s == 0 ? cb : ca;
        for (std::size_t i = 0; i < members.size(); ++i) {
          const double sim = SparseDot(
              vectors[static_cast<std::size_t>(members[i])].weights, other);
          if (sim < weakest_sim) {
            weakest_sim = sim;
            weakest = i;
          }
        }
        side[weakest] = s;
        changed = true;
      }
    }
    ca.setZero();
    cb.setZero();
    for (std::size_t i = 0; i < members.size(); ++i)
      SparseAdd(vectors[static_cast<std::size_t>(members[i])].weights, 1.0,
                side[i] == 0 ? &ca : &cb);
    if (!changed) break;
  }
  std::pair<std::vector<int>, std::vector<int>> out;
  for (std::size_t i = 0; i < members.size(); ++i)
    (side[i] == 0 ? out.first : out.second).push_back(members[i]);
  return out;
}

Eigen::VectorXd SumOf(const std::vector<DocVector> &vectors, int dim,
                      const std::vector<int> &members) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(dim);
  for (int m : members)
    SparseAdd(vectors[static_cast<std::size_t>(m)].weights, 1.0, &s);
  return s;
}

std::vector<int> ClusterOnce(const std::vector<DocVector> &vectors, int dim,
                             int k, std::uint64_t restart_seed,
                             double *i2_out) {
  ClusterState state;
  state.members.push_back(std::vector<int>(vectors.size()));
  std::iota(state.members[0].begin(), state.members[0].end(), 0);
  state.sums.push_back(SumOf(vectors, dim, state.members[0]));

  int step = 0;
  while (static_cast<int>(state.members.size()) < k) {
    // Trial-split every current cluster; keep the split that improves
    // the global criterion most.
    int best_cluster = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    std::pair<std::vector<int>, std::vector<int>> best_split;
    for (std::size_t c = 0; c < state.members.size(); ++c) {
      if (state.members[c].size() < 2) continue;
      std::mt19937_64 rng(MixSeed(restart_seed,
                                  0xb15ec7 + 1000ULL * step + c));
      auto split = Bisect(vectors, dim, state.members[c], &rng);
      const double gain = SumOf(vectors, dim, split.first).norm() +
                          SumOf(vectors, dim, split.second).norm() -
                          state.sums[c].norm();
      if (gain > best_gain) {
        best_gain = gain;
        best_cluster = static_cast<int>(c);
        best_split = std::move(split);
      }
    }
    if (best_cluster < 0) break;  // nothing splittable
    state.members[static_cast<std::size_t>(best_cluster)] = best_split.first;
    state.sums[static_cast<std::size_t>(best_cluster)] =
        SumOf(vectors, dim, best_split.first);
    state.members.push_back(best_split.second);
    state.sums.push_back(SumOf(vectors, dim, best_split.second));
    ++step;
  }

  // Refinement: greedy single-document moves while I2 improves.
  std::vector<int> assign(vectors.size(), 0);
  for (std::size_t c = 0; c < state.members.size(); ++c)
    for (int m : state.members[c]) assign[static_cast<std::size_t>(m)] =
        static_cast<int>(c);
  std::vector<int> sizes(state.members.size());
  for (std::size_t c = 0; c < state.members.size(); ++c)
    sizes[c] = static_cast<int>(state.members[c].size());

  for (int pass = 0; pass < 100; ++pass) {
    bool moved = false;
    for (std::size_t d = 0; d < vectors.size(); ++d) {
      const int cur = assign[d];
      if (sizes[static_cast<std::size_t>(cur)] <= 1) continue;
      const auto &w = vectors[d].weights;
      const Eigen::VectorXd &cur_sum = state.sums[static_cast<std::size_t>(cur)];
      double cur_norm = cur_sum.norm();
      Eigen::VectorXd cur_minus = cur_sum;
      SparseAdd(w, -1.0, &cur_minus);
      const double removed_norm = cur_minus.norm();
      int best_target = -1;
      double best_delta = 1e-10;
      for (std::size_t c = 0; c < state.sums.size(); ++c) {
        if (static_cast<int>(c) == cur) continue;
        Eigen::VectorXd plus = state.sums[c];
        SparseAdd(w, 1.0, &plus);
        const double delta =
            removed_norm + plus.norm() - cur_norm - state.sums[c].norm();
        if (delta > best_delta) {
          best_delta = delta;
          best_target = static_cast<int>(c);
        }
      }
      if (best_target >= 0) {
        SparseAdd(w, -1.0, &state.sums[static_cast<std::size_t>(cur)]);
        SparseAdd(w, 1.0, &state.sums[static_cast<std::size_t>(best_target)]);
        --sizes[static_cast<std::size_t>(cur)];
        ++sizes[static_cast<std::size_t>(best_target)];
        assign[d] = best_target;
        moved = true;
      }
    }
    if (!moved) break;
  }

  double i2 = 0.0;
  for (const auto &s : state.sums) i2 += s.norm();
  if (i2_out != nullptr) *i2_out = i2;
  return assign;
}

}  // namespace

std::vector<int> RepeatedBisectionCluster(const std::vector<DocVector> &vectors,
                                          int dim, int k, int n_init,
                                          std::uint64_t seed, int jobs) {
  if (k < 2) throw ValidationError("clustering needs k >= 2");
  if (k > static_cast<int>(vectors.size()))
    throw ValidationError("k exceeds the number of documents");
  if (n_init < 1) throw ValidationError("n_init must be >= 1");

  std::vector<std::vector<int>> results(static_cast<std::size_t>(n_init));
  std::vector<double> scores(static_cast<std::size_t>(n_init), 0.0);
  ParallelChunks(static_cast<std::size_t>(n_init), jobs,
                 [&](std::size_t b, std::size_t e) {
                   for (std::size_t r = b; r < e; ++r)
                     results[r] = ClusterOnce(vectors, dim, k,
                                              MixSeed(seed, r), &scores[r]);
                 });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (scores[r] > scores[best]) best = r;
  return results[best];
}

double Purity(const std::vector<int> &assignments,
              const std::vector<std::string> &labels) {
  if (assignments.size() != labels.size() || assignments.empty())
    throw ValidationError("purity: assignment/label size mismatch");
  std::map<int, std::map<std::string, int>> table;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    ++table[assignments[i]][labels[i]];
  double hits = 0.0;
  for (const auto &[cluster, counts] : table) {
    int best = 0;
    for (const auto &[label, n] : counts) best = std::max(best, n);
    hits += best;
  }
  return hits / static_cast<double>(assignments.size());
}

double BcubedF1(const std::vector<int> &assignments,
                const std::vector<std::string> &labels) {
  if (assignments.size() != labels.size() || assignments.empty())
    throw ValidationError("bcubed: assignment/label size mismatch");
  const std::size_t n = assignments.size();
  std::map<int, std::map<std::string, int>> cluster_label;
  std::map<int, int> cluster_size;
  std::map<std::string, int> label_size;
  for (std::size_t i = 0; i < n; ++i) {
    ++cluster_label[assignments[i]][labels[i]];
    ++cluster_size[assignments[i]];
    ++label_size[labels[i]];
  }
  double precision = 0.0, recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int overlap = cluster_label[assignments[i]][labels[i]];
    precision += static_cast<double>(overlap) / cluster_size[assignments[i]];
    recall += static_cast<double>(overlap) / label_size[labels[i]];
  }
  precision /= static_cast<double>(n);
  recall /= static_cast<double>(n);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace aud
