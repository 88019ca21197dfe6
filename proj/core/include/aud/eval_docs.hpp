// core/include/aud/eval_docs.hpp
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

#ifndef AUD_EVAL_DOCS_HPP_
#define AUD_EVAL_DOCS_HPP_

#include <cstdint>
#include <map>

#include "aud/corpus.hpp"
#include "aud/decoder.hpp"

namespace aud {

// L2-normalized sparse TFIDF vector over unit n-grams; features sorted
// by id.
struct DocVector {
  std::string doc_id;
  std::string label;  // empty = unlabeled
  std::vector<std::pair<int, double>> weights;
};

struct DocVectorSet {
  std::vector<DocVector> vectors;
  std::map<std::string, int> vocabulary;  // n-gram key -> feature id
  int Dim() const { return static_cast<int>(vocabulary.size()); }
};

/// Bag-of-units TFIDF: term counts over unit n-grams (n in [n_lo,
/// n_hi], never across utterance boundaries), idf = ln(N/df), vectors
/// L2-normalized.  Zero vectors are left zero with a warning.
DocVectorSet NgramTfidf(const DocumentSet &docs, const Tokenization &tok,
                        int n_lo, int n_hi,
                        std::vector<std::string> *warnings = nullptr);

struct SvmConfig {
  int epochs = 30;
  double lambda_l1 = 1e-5;
  double eta0 = 1.0;
  std::uint64_t seed = 0;
};

struct LinearSvmModel {
  std::vector<std::string> classes;  // sorted
  Eigen::MatrixXd weights;           // classes x dim
  Eigen::VectorXd bias;              // classes
};

/// One-vs-rest hinge-loss SGD with the cumulative-L1-penalty update, so
/// sparse examples stay sparse; eta_t = eta0 / (1 + eta0*lambda*t).
LinearSvmModel TrainSvmSgd(const std::vector<DocVector> &vectors, int dim,
                           const SvmConfig &cfg);

/// Argmax class score; ties go to the lexicographically first class.
std::string SvmPredict(const LinearSvmModel &model, const DocVector &v);

/// Hinge + L1 objective, summed over classes; used to monitor training.
double SvmObjective(const LinearSvmModel &model,
                    const std::vector<DocVector> &vectors, double lambda_l1);

/// Stratified k-fold accuracy: (mean, population std).
std::pair<double, double> CrossValidate(const std::vector<DocVector> &vectors,
                                        int dim, int folds,
                                        const SvmConfig &cfg,
                                        std::uint64_t fold_seed);

/// Repeated spherical 2-means bisection maximizing I2 = sum of cluster
/// centroid norms, with a final reassignment refinement; best of n_init
/// seeded restarts.  Returns cluster index per document.
std::vector<int> RepeatedBisectionCluster(const std::vector<DocVector> &vectors,
                                          int dim, int k, int n_init,
                                          std::uint64_t seed, int jobs = 0);

double Purity(const std::vector<int> &assignments,
              const std::vector<std::string> &labels);

double BcubedF1(const std::vector<int> &assignments,
                const std::vector<std::string> &labels);

}  // namespace aud

#endif  // AUD_EVAL_DOCS_HPP_
