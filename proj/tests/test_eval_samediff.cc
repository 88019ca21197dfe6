// tests/test_eval_samediff.cc
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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "aud/eval_samediff.hpp"
#include "oracles.hpp"

using namespace aud;

namespace {

Eigen::MatrixXd RandomRows(std::mt19937_64 &rng, int n, int k) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Eigen::MatrixXd m(n, k);
  for (int r = 0; r < n; ++r) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      m(r, c) = u(rng);
      total += m(r, c);
    }
    m.row(r) /= total;
  }
  return m;
}

}  // namespace

TEST_CASE("word segment extraction applies both floors") {
  ReferenceTranscript words;
  words.tokens["u"] = {{"CAT", 0, 80},        // 0.8 s but 3 chars
                       {"recycling", 0, 40},  // 9 chars but 0.4 s
                       {"Recycling", 0, 70}}; // both floors met
  auto segs = ExtractWordSegments(words, 0.5, 6, 0.010);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].word_type == "recycling");
  CHECK(segs[0].end_frame == 70);
}

TEST_CASE("symmetric kl basics") {
  Eigen::VectorXd p(2), q(2);
  p << 0.5, 0.5;
  q << 0.25, 0.75;
  CHECK(SymmetricKl(p, p, 1e-8) == doctest::Approx(0.0));
  // KL(p||q)+KL(q||p) = 0.5 ln2 + 0.5 ln(2/3) + 0.25 ln(1/2) + 0.75 ln(3/2)
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0) +
                          0.25 * std::log(0.5) + 0.75 * std::log(1.5);
  CHECK(SymmetricKl(p, q, 1e-8) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.2747).epsilon(1e-3));
}

TEST_CASE("symmetric kl floors disjoint supports to a finite value") {
  Eigen::VectorXd p(2), q(2);
  p << 1.0, 0.0;
  q << 0.0, 1.0;
  const double floor = 1e-10;
  const double got = SymmetricKl(p, q, floor);
  CHECK(std::isfinite(got));
  // After flooring and renormalizing both vectors are (1-eps', eps')
  // mirrored; recompute directly.
  const double z = 1.0 + floor;
  const double a = 1.0 / z, b = floor / z;
  const double expected = 2.0 * (a * std::log(a / b) + b * std::log(b / a));
  CHECK(got == doctest::Approx(expected).epsilon(1e-9));
  CHECK_THROWS_AS(SymmetricKl(p, Eigen::VectorXd::Ones(3), floor),
                  ValidationError);
}

TEST_CASE("dtw of identical segments is exactly zero") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd a = RandomRows(rng, 1 + rep % 6, 4);
    CHECK(DtwDistance(a, a, 1e-8) == 0.0);
  }
}

TEST_CASE("dtw is exactly symmetric") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::MatrixXd a = RandomRows(rng, 1 + rep % 5, 3);
    Eigen::MatrixXd b = RandomRows(rng, 1 + (rep * 7) % 5, 3);
    CHECK(DtwDistance(a, b, 1e-8) == DtwDistance(b, a, 1e-8));
  }
}

TEST_CASE("dtw single-frame pair reduces to the local cost") {
  std::mt19937_64 rng(13);
  Eigen::MatrixXd a = RandomRows(rng, 1, 5), b = RandomRows(rng, 1, 5);
  CHECK(DtwDistance(a, b, 1e-8) ==
        doctest::Approx(SymmetricKl(a.row(0), b.row(0), 1e-8)).epsilon(1e-12));
}

TEST_CASE("dtw matches exhaustive monotone-path enumeration") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    const int na = 1 + rep % 4, nb = 1 + (rep * 3) % 4;
    Eigen::MatrixXd a = RandomRows(rng, na, 3), b = RandomRows(rng, nb, 3);
    Eigen::MatrixXd cost(na, nb);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j)
        cost(i, j) = SymmetricKl(a.row(i), b.row(j), 1e-8);
    CHECK(std::abs(DtwDistance(a, b, 1e-8) -
                   oracles::DtwByEnumeration(cost)) < 1e-12);
  }
}

TEST_CASE("dtw band constraint") {
  std::mt19937_64 rng(19);
  Eigen::MatrixXd a = RandomRows(rng, 5, 3), b = RandomRows(rng, 5, 3);
  // A generous band reproduces the unconstrained distance.
  CHECK(DtwDistance(a, b, 1e-8, 10) ==
        doctest::Approx(DtwDistance(a, b, 1e-8)).epsilon(1e-12));
  // An infeasible band on very different lengths errors.
  Eigen::MatrixXd c = RandomRows(rng, 12, 3);
  CHECK_THROWS_AS(DtwDistance(a, c, 1e-8, 1), ValidationError);
}

TEST_CASE("average precision of perfect separation is one") {
  std::vector<ScoredPair> pairs = {{0, 1, 0.1, true},
                                   {0, 2, 0.2, true},
                                   {1, 2, 0.9, false},
                                   {2, 3, 0.8, false}};
  CHECK(AveragePrecision(pairs) == 1.0);
}

TEST_CASE("average precision rank fixture") {
  // Ascending ranks: diff, same, same, diff -> (1/2 + 2/3) / 2.
  std::vector<ScoredPair> pairs = {{0, 1, 0.1, false},
                                   {0, 2, 0.2, true},
                                   {1, 2, 0.3, true},
                                   {2, 3, 0.4, false}};
  CHECK(std::abs(AveragePrecision(pairs) - (0.5 + 2.0 / 3.0) / 2.0) < 1e-12);
}

TEST_CASE("average precision single positive ranked last") {
  std::vector<ScoredPair> pairs;
  for (int i = 0; i < 5; ++i)
    pairs.push_back({i, i + 1, 0.1 * (i + 1), i == 4});
  CHECK(AveragePrecision(pairs) == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("average precision rejects zero positives") {
  std::vector<ScoredPair> pairs = {{0, 1, 0.5, false}};
  CHECK_THROWS_AS(AveragePrecision(pairs), ValidationError);
}

TEST_CASE("average precision is invariant under monotone transforms") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredPair> pairs;
  for (int i = 0; i < 50; ++i)
    pairs.push_back({i, i + 50, u(rng), u(rng) < 0.3});
  if (std::none_of(pairs.begin(), pairs.end(),
                   [](const ScoredPair &p) { return p.same_type; }))
    pairs[0].same_type = true;
  const double base = AveragePrecision(pairs);
  for (auto &p : pairs) p.distance = std::exp(3.0 * p.distance) - 0.5;
  CHECK(AveragePrecision(pairs) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("random-score average precision is near the positive rate") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Large pools keep the small-sample bias of random-ranking AP well
  // below the Monte-Carlo error bound.
  const int P = 500, N = 2000;
  const double expected = static_cast<double>(P) / (P + N);
  double sum = 0.0, sumsq = 0.0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<ScoredPair> pairs;
    int id = 0;
    for (int i = 0; i < P; ++i) pairs.push_back({id++, 1000 + id, u(rng), true});
    for (int i = 0; i < N; ++i)
      pairs.push_back({id++, 1000 + id, u(rng), false});
    const double ap = AveragePrecision(pairs);
    sum += ap;
    sumsq += ap * ap;
  }
  const double mean = sum / trials;
  const double var = sumsq / trials - mean * mean;
  const double stderr_mean = std::sqrt(var / trials);
  CHECK(std::abs(mean - expected) <= 3.0 * std::max(stderr_mean, 1e-3));
}

TEST_CASE("same-different eval on a trivial fixture") {
  Posteriorgram pg;
  Eigen::MatrixXd a(2, 3), b(2, 3), c(2, 3);
  a << 0.8, 0.1, 0.1, 0.8, 0.1, 0.1;
  b = a;
  c << 0.1, 0.1, 0.8, 0.1, 0.1, 0.8;
  pg.utterances.push_back({"u1", a});
  pg.utterances.push_back({"u2", b});
  pg.utterances.push_back({"u3", c});
  std::vector<WordSegment> segs = {{"u1", 0, 2, "cat"},
                                   {"u2", 0, 2, "cat"},
                                   {"u3", 0, 2, "dog"}};
  SameDiffResult res = SameDifferentEval(segs, pg, 1e-8);
  CHECK(res.total_pairs == 3);
  CHECK(res.positives == 1);
  CHECK(res.average_precision == 1.0);
}

TEST_CASE("same-different eval rejects out-of-bounds segments") {
  Posteriorgram pg;
  pg.utterances.push_back({"u1", Eigen::MatrixXd::Constant(3, 2, 0.5)});
  std::vector<WordSegment> segs = {{"u1", 0, 5, "cat"}, {"u1", 0, 2, "cat"}};
  CHECK_THROWS_AS(SameDifferentEval(segs, pg, 1e-8), ValidationError);
}

TEST_CASE("same-different eval is order invariant") {
  std::mt19937_64 rng(31);
  Posteriorgram pg;
  pg.utterances.push_back({"u", RandomRows(rng, 30, 4)});
  std::vector<WordSegment> segs;
  const char *types[2] = {"aaa", "bbb"};
  for (int i = 0; i < 8; ++i)
    segs.push_back({"u", i * 3, i * 3 + 3, types[i % 2]});
  SameDiffResult r1 = SameDifferentEval(segs, pg, 1e-8);
  std::reverse(segs.begin(), segs.end());
  SameDiffResult r2 = SameDifferentEval(segs, pg, 1e-8);
  CHECK(r1.average_precision == doctest::Approx(r2.average_precision));
}
