// tests/test_lda.cc
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

#include <filesystem>
#include <random>

#include "doctest.h"

#include "aud/lda.hpp"
#include "oracles.hpp"

using namespace aud;

namespace {

// Three classes in 3-D whose means differ only along dim 0; noise 0.01
// elsewhere keeps the scatter full-rank.
void MakeClassData(std::mt19937_64 &rng, FeatureSet *fs,
                   std::map<std::string, std::vector<int>> *labels,
                   int n_per_class = 200) {
  std::normal_distribution<double> noise(0.0, 0.01);
  const double centers[3] = {-2.0, 0.0, 2.0};
  Eigen::MatrixXd frames(3 * n_per_class, 3);
  std::vector<int> lab;
  int r = 0;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n_per_class; ++i, ++r) {
      frames(r, 0) = centers[c] + noise(rng);
      frames(r, 1) = noise(rng);
      frames(r, 2) = noise(rng);
      lab.push_back(c);
    }
  fs->utterances.push_back({"u", std::move(frames)});
  (*labels)["u"] = std::move(lab);
}

Eigen::MatrixXd WithinScatter(const FeatureSet &fs,
                              const std::map<std::string, std::vector<int>> &labels,
                              double ridge) {
  // Population-scaled within-class scatter, recomputed independently.
  const auto &frames = fs.utterances[0].features;
  const auto &lab = labels.at("u");
  std::map<int, std::vector<int>> members;
  for (std::size_t i = 0; i < lab.size(); ++i)
    members[lab[i]].push_back(static_cast<int>(i));
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(frames.cols(), frames.cols());
  for (const auto &[c, rows] : members) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(frames.cols());
    for (int r : rows) mean += frames.row(r);
    mean /= static_cast<double>(rows.size());
    for (int r : rows) {
      Eigen::RowVectorXd d = frames.row(r) - mean;
      sw += d.transpose() * d;
    }
  }
  sw /= static_cast<double>(frames.rows());
  sw += ridge * Eigen::MatrixXd::Identity(frames.cols(), frames.cols());
  return sw;
}

}  // namespace

TEST_CASE("lda recovers the informative axis") {
  std::mt19937_64 rng(101);
  FeatureSet fs;
  std::map<std::string, std::vector<int>> labels;
  MakeClassData(rng, &fs, &labels);
  LdaTransform t = EstimateLda(fs, labels, 2);
  CHECK(t.class_count == 3);
  Eigen::VectorXd top = t.projection.row(0).transpose().normalized();
  CHECK(std::abs(top(0)) >= 0.99);
  CHECK(t.eigenvalues(0) >= t.eigenvalues(1));
  CHECK(t.eigenvalues(1) >= -1e-9);
}

TEST_CASE("projected within-class covariance is the identity") {
  std::mt19937_64 rng(103);
  FeatureSet fs;
  std::map<std::string, std::vector<int>> labels;
  MakeClassData(rng, &fs, &labels);
  const double ridge = 1e-6;
  LdaTransform t = EstimateLda(fs, labels, 2, ridge);
  Eigen::MatrixXd sw = WithinScatter(fs, labels, ridge);
  Eigen::MatrixXd psp = t.projection * sw * t.projection.transpose();
  CHECK((psp - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lda rejects degenerate label sets") {
  FeatureSet fs;
  fs.utterances.push_back({"u", Eigen::MatrixXd::Random(10, 3)});
  std::map<std::string, std::vector<int>> labels;
  labels["u"] = std::vector<int>(10, 4);
  CHECK_THROWS_AS(EstimateLda(fs, labels, 1), ValidationError);

  std::map<std::string, std::vector<int>> two;
  two["u"] = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(EstimateLda(fs, two, 2), ValidationError);  // dim_out > C-1
}

TEST_CASE("apply lda centers and projects") {
  LdaTransform t;
  t.input_mean = Eigen::VectorXd::Constant(2, 1.0);
  t.projection = Eigen::MatrixXd::Identity(2, 2);
  t.class_count = 2;
  t.eigenvalues = Eigen::VectorXd::Ones(2);
  FeatureSet fs;
  Eigen::MatrixXd m(1, 2);
  m << 1.0, 1.0;
  fs.utterances.push_back({"u", m});
  FeatureSet out = ApplyLda(t, fs);
  CHECK(out.utterances[0].features.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lda is invariant to invertible recoding up to sign") {
  std::mt19937_64 rng(107);
  FeatureSet fs;
  std::map<std::string, std::vector<int>> labels;
  MakeClassData(rng, &fs, &labels);
  // The default data-scaled ridge is not recoding-invariant, so pin it
  // to a negligible explicit value for this property.
  const double ridge = 1e-10;
  LdaTransform t = EstimateLda(fs, labels, 2, ridge);
  FeatureSet base = ApplyLda(t, fs);

  // Random invertible affine recoding of the inputs.
  Eigen::MatrixXd a(3, 3);
  a << 1.0, 0.3, -0.2, 0.1, 0.9, 0.4, -0.5, 0.2, 1.1;
  Eigen::VectorXd shift(3);
  shift << 0.7, -1.3, 0.2;
  FeatureSet recoded = fs;
  recoded.utterances[0].features =
      (fs.utterances[0].features * a.transpose()).rowwise() +
      shift.transpose();
  LdaTransform t2 = EstimateLda(recoded, labels, 2, ridge);
  FeatureSet proj2 = ApplyLda(t2, recoded);

  const auto &x = base.utterances[0].features;
  const auto &y = proj2.utterances[0].features;
  for (int c = 0; c < 2; ++c) {
    const double sign = (x.col(c).dot(y.col(c)) >= 0.0) ? 1.0 : -1.0;
    const double scale = x.col(c).cwiseAbs().maxCoeff();
    CHECK((x.col(c) - sign * y.col(c)).cwiseAbs().maxCoeff() <
          1e-5 * scale + 1e-5);
  }
}

TEST_CASE("lda transform save and load round-trip") {
  std::mt19937_64 rng(109);
  FeatureSet fs;
  std::map<std::string, std::vector<int>> labels;
  MakeClassData(rng, &fs, &labels);
  LdaTransform t = EstimateLda(fs, labels, 2);
  const std::string path =
      (std::filesystem::temp_directory_path() / "audkit_test_lda.json")
          .string();
  SaveLdaTransform(path, t);
  LdaTransform back = LoadLdaTransform(path);
  CHECK((back.projection - t.projection).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.input_mean - t.input_mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.class_count == t.class_count);
  std::filesystem::remove(path);
}

TEST_CASE("transfer stats reduce to a plain e-step on identical features") {
  std::mt19937_64 rng(113);
  PhoneLoopModel m = oracles::RandomTinyModel(rng);
  FeatureSet fs;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    Eigen::MatrixXd x(5, m.config.dim);
    for (int r = 0; r < 5; ++r)
      for (int d = 0; d < m.config.dim; ++d) x(r, d) = normal(rng);
    fs.utterances.push_back({"utt" + std::to_string(i), std::move(x)});
  }
  SufficientStats direct = EStep(m, fs, 1);
  SufficientStats transferred = TransferStats(m, fs, fs, 1);
  CHECK((direct.s1 - transferred.s1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((direct.s2 - transferred.s2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((direct.comp_occ - transferred.comp_occ).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((direct.unit_entry - transferred.unit_entry).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("transfer stats scale moments linearly in the second features") {
  std::mt19937_64 rng(127);
  PhoneLoopModel m = oracles::RandomTinyModel(rng);
  FeatureSet fs;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(6, m.config.dim);
  for (int r = 0; r < 6; ++r)
    for (int d = 0; d < m.config.dim; ++d) x(r, d) = normal(rng);
  fs.utterances.push_back({"u", x});
  FeatureSet doubled;
  doubled.utterances.push_back({"u", 2.0 * x});

  SufficientStats base = TransferStats(m, fs, fs, 1);
  SufficientStats scaled = TransferStats(m, fs, doubled, 1);
  CHECK((scaled.s1 - 2.0 * base.s1).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((scaled.s2 - 4.0 * base.s2).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((scaled.comp_occ - base.comp_occ).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transfer stats reject misaligned feature sets") {
  std::mt19937_64 rng(131);
  PhoneLoopModel m = oracles::RandomTinyModel(rng);
  FeatureSet a, b;
  a.utterances.push_back({"u", Eigen::MatrixXd::Zero(4, m.config.dim)});
  b.utterances.push_back({"u", Eigen::MatrixXd::Zero(5, 2)});
  CHECK_THROWS_AS(TransferStats(m, a, b, 1), ValidationError);
}
