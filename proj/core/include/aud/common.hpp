// core/include/aud/common.hpp
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

#ifndef AUD_COMMON_HPP_
#define AUD_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aud {

// Error taxonomy shared across the toolkit.  The CLI maps these onto
// distinct exit codes (usage=1, io=2, validation=3, numeric=4).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// Digamma function for x > 0.  Recurrence into the asymptotic region,
/// then the standard Bernoulli series; accurate to ~1e-12.
double Digamma(double x);

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double LogSumExp(const double *data, std::size_t n);

inline double LogSumExp(const std::vector<double> &v) {
  return LogSumExp(v.data(), v.size());
}

/// Contiguous chunk layout of [0, n) for at most `jobs` workers; jobs
/// <= 0 means hardware concurrency.  Depends only on n and jobs, so
/// callers that merge chunk results in index order get reproducible
/// reductions.
std::vector<std::pair<std::size_t, std::size_t>> ChunkRanges(std::size_t n,
                                                             int jobs);

/// Runs worker(begin, end) over [0, n) split per ChunkRanges, one thread
/// per chunk.  Worker exceptions are rethrown on the calling thread.
void ParallelChunks(std::size_t n, int jobs,
                    const std::function<void(std::size_t, std::size_t)> &worker);

/// Splitmix64 step; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace aud

#endif  // AUD_COMMON_HPP_
