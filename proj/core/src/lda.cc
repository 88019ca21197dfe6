// core/src/lda.cc
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

#include "aud/lda.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace aud {

LdaTransform EstimateLda(const FeatureSet &spliced,
                         const std::map<std::string, std::vector<int>> &labels,
                         int dim_out, double ridge) {
  spliced.Validate();
  const int dim_in = spliced.Dim();

  // Per-class first/second moments over all labeled frames.
  std::map<int, std::pair<Eigen::VectorXd, double>> class_sum;  // sum, count
  Eigen::VectorXd total_sum = Eigen::VectorXd::Zero(dim_in);
  double total_n = 0.0;
  for (const auto &u : spliced.utterances) {
    auto it = labels.find(u.id);
    if (it == labels.end())
      throw ValidationError("no frame labels for utterance " + u.id);
    if (static_cast<Eigen::Index>(it->second.size()) != u.features.rows())
      throw ValidationError("label count does not match frames in " + u.id);
  }

  // Scatter accumulation: S_w from class-centered frames needs class
  // means first, so accumulate raw second moments and correct after.
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim_in, dim_in);
  for (const auto &u : spliced.utterances) {
    const auto &frame_labels = labels.at(u.id);
    second.noalias() += u.features.transpose() * u.features;
    for (Eigen::Index f = 0; f < u.features.rows(); ++f) {
      auto &[sum, count] = class_sum[frame_labels[static_cast<std::size_t>(f)]];
      if (count == 0.0) sum = Eigen::VectorXd::Zero(dim_in);
      sum += u.features.row(f).transpose();
      count += 1.0;
    }
    total_sum += u.features.colwise().sum().transpose();
    total_n += static_cast<double>(u.features.rows());
  }
  const int n_classes = static_cast<int>(class_sum.size());
  if (n_classes < 2)
    throw ValidationError("LDA needs at least 2 distinct classes, got " +
                          std::to_string(n_classes));
  if (dim_out < 1 || dim_out > std::min(dim_in, n_classes - 1))
    throw ValidationError("dim_out must be in [1, min(dim_in, classes-1)]");

  const Eigen::VectorXd global_mean = total_sum / total_n;

  // S_w = E[xx'] - sum_c p_c mu_c mu_c';  S_b = sum_c p_c (mu_c - mu)(...)'.
  Eigen::MatrixXd sw = second / total_n;
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(dim_in, dim_in);
  for (const auto &[cls, sc] : class_sum) {
    const Eigen::VectorXd mu_c = sc.first / sc.second;
    const double p_c = sc.second / total_n;
    sw.noalias() -= p_c * mu_c * mu_c.transpose();
    const Eigen::VectorXd d = mu_c - global_mean;
    sb.noalias() += p_c * d * d.transpose();
  }

  if (ridge < 0.0) ridge = 1e-4 * sw.trace() / dim_in;
  sw.diagonal().array() += ridge;

  Eigen::LLT<Eigen::MatrixXd> llt(sw);
  if (llt.info() != Eigen::Success)
    throw NumericError(
        "within-class scatter not positive definite after ridge (failing "
        "Cholesky pivot)");
  const Eigen::MatrixXd l = llt.matrixL();

  // Whiten: C = L^-1 S_b L^-T, then a symmetric eigendecomposition.
  Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(sb);
  c = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());  // guard symmetry against rounding
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of whitened scatter failed");

  LdaTransform t;
  t.input_mean = global_mean;
  t.class_count = n_classes;
  t.eigenvalues.resize(dim_out);
  t.projection.resize(dim_out, dim_in);
  // SelfAdjointEigenSolver sorts ascending; take the top from the back.
  for (int k = 0; k < dim_out; ++k) {
    const Eigen::Index src = dim_in - 1 - k;
    t.eigenvalues(k) = std::max(0.0, eig.eigenvalues()(src));
    const Eigen::VectorXd u = eig.eigenvectors().col(src);
    t.projection.row(k) =
        l.transpose().triangularView<Eigen::Upper>().solve(u).transpose();
  }
  return t;
}

FeatureSet ApplyLda(const LdaTransform &t, const FeatureSet &fs) {
  if (fs.Dim() != t.input_mean.size())
    throw ValidationError("feature dim does not match LDA input dim");
  FeatureSet out = fs;
  for (auto &u : out.utterances)
    u.features = (u.features.rowwise() - t.input_mean.transpose()) *
                 t.projection.transpose();
  return out;
}

void SaveLdaTransform(const std::string &path, const LdaTransform &t) {
  nlohmann::json j;
  j["format"] = "audkit-lda";
  j["version"] = 1;
  j["class_count"] = t.class_count;
  j["input_mean"] = std::vector<double>(t.input_mean.data(),
                                        t.input_mean.data() + t.input_mean.size());
  j["eigenvalues"] = std::vector<double>(
      t.eigenvalues.data(), t.eigenvalues.data() + t.eigenvalues.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < t.projection.rows(); ++r) {
    const Eigen::RowVectorXd row = t.projection.row(r);
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["projection"] = std::move(rows);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write LDA transform: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

LdaTransform LoadLdaTransform(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open LDA transform: " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != "audkit-lda")
      throw IoError("not an LDA transform file: " + path);
    if (j.at("version").get<int>() != 1)
      throw IoError("unsupported LDA transform version in " + path);
    LdaTransform t;
    t.class_count = j.at("class_count").get<int>();
    auto mean = j.at("input_mean").get<std::vector<double>>();
    t.input_mean = Eigen::Map<Eigen::VectorXd>(mean.data(),
                                               static_cast<Eigen::Index>(mean.size()));
    auto eval = j.at("eigenvalues").get<std::vector<double>>();
    t.eigenvalues = Eigen::Map<Eigen::VectorXd>(
        eval.data(), static_cast<Eigen::Index>(eval.size()));
    const auto &rows = j.at("projection");
    t.projection.resize(static_cast<Eigen::Index>(rows.size()),
                        t.input_mean.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto row = rows[r].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != t.input_mean.size())
        throw IoError("LDA projection row length mismatch in " + path);
      t.projection.row(static_cast<Eigen::Index>(r)) =
          Eigen::Map<Eigen::VectorXd>(row.data(),
                                      static_cast<Eigen::Index>(row.size()))
              .transpose();
    }
    return t;
  } catch (const nlohmann::json::exception &e) {
    throw IoError("corrupt LDA transform " + path + ": " + e.what());
  }
}

SufficientStats TransferStats(const PhoneLoopModel &first_pass,
                              const FeatureSet &fs_first,
                              const FeatureSet &fs_second, int jobs) {
  fs_first.Validate();
  fs_second.Validate();
  if (fs_first.utterances.size() != fs_second.utterances.size())
    throw ValidationError("transfer: feature sets differ in utterance count");
  for (std::size_t i = 0; i < fs_first.utterances.size(); ++i) {
    const auto &a = fs_first.utterances[i];
    const auto &b = fs_second.utterances[i];
    if (a.id != b.id)
      throw ValidationError("transfer: utterance order mismatch at " + a.id);
    if (a.features.rows() != b.features.rows())
      throw ValidationError("transfer: frame count mismatch in utterance " +
                            a.id);
  }
  if (fs_first.Dim() != first_pass.config.dim)
    throw ValidationError("transfer: first-pass feature dim mismatch");

  const UnifiedHmmView view = MakeUnifiedView(first_pass);
  const int M = first_pass.config.gaussians_per_state;
  const auto ranges = ChunkRanges(fs_first.utterances.size(), jobs);
  std::vector<SufficientStats> partial(ranges.size());
  ParallelChunks(ranges.size(), static_cast<int>(ranges.size()),
                 [&](std::size_t rb, std::size_t re) {
                   for (std::size_t r = rb; r < re; ++r) {
                     SufficientStats local =
                         SufficientStats::Zeros(first_pass, fs_second.Dim());
                     for (std::size_t i = ranges[r].first;
                          i < ranges[r].second; ++i) {
                       Eigen::MatrixXd ll = ExpectedFrameLoglik(
                           first_pass, fs_first.utterances[i].features);
                       FbResult fb = ForwardBackward(view, ll, M);
                       AccumulateStats(fb, fs_second.utterances[i].features,
                                       &local);
                     }
                     partial[r] = std::move(local);
                   }
                 });
  SufficientStats total = SufficientStats::Zeros(first_pass, fs_second.Dim());
  for (const auto &p : partial) total.MergeFrom(p);
  return total;
}

}  // namespace aud
