// core/src/common.cc
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

#include "aud/common.hpp"

#include <algorithm>
#include <thread>

namespace aud {

double Digamma(double x) {
  if (!(x > 0.0)) throw NumericError("Digamma requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 -
                                            inv2 * (1.0 / 132.0)))));
  return result;
}

double LogSumExp(const double *data, std::size_t n) {
  double max = kLogZero;
  for (std::size_t i = 0; i < n; ++i) max = std::max(max, data[i]);
  if (max == kLogZero) return kLogZero;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(data[i] - max);
  return max + std::log(sum);
}

std::vector<std::pair<std::size_t, std::size_t>> ChunkRanges(std::size_t n,
                                                             int jobs) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  if (n == 0) return ranges;
  std::size_t n_jobs = jobs > 0
                           ? static_cast<std::size_t>(jobs)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_jobs = std::min(n_jobs, n);
  const std::size_t base = n / n_jobs, rem = n % n_jobs;
  std::size_t begin = 0;
  for (std::size_t j = 0; j < n_jobs; ++j) {
    const std::size_t end = begin + base + (j < rem ? 1 : 0);
    ranges.emplace_back(begin, end);
    begin = end;
  }
  return ranges;
}

void ParallelChunks(std::size_t n, int jobs,
                    const std::function<void(std::size_t, std::size_t)> &worker) {
  const auto ranges = ChunkRanges(n, jobs);
  if (ranges.empty()) return;
  if (ranges.size() == 1) {
    worker(ranges[0].first, ranges[0].second);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(ranges.size());
  std::vector<std::exception_ptr> errors(ranges.size());
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    threads.emplace_back([&worker, &errors, &ranges, j] {
      try {
        worker(ranges[j].first, ranges[j].second);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto &t : threads) t.join();
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace aud
