#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace fwscale {

inline constexpr std::size_t kMonteCarloBlock = 1024;

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed of sample block `block` under the master seed.
inline std::uint64_t BlockSeed(std::uint64_t seed, std::uint64_t block) {
  return SplitMix64(SplitMix64(seed) ^ (block * 0xD1B54A32D192ED03ull + 1));
}

// Uniform double in [0,1) from the top 53 bits.
inline double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void Add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  void Merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
    return std::sqrt(var / n);
  }
};

// Runs `samples` draws of a `dim`-dimensional statistic. Draws are grouped
// in fixed blocks, each with its own seed, and block results are merged in
// block order, so the output depends on (seed, samples) only and not on the
// number of threads. `draw(rng, out)` fills one sample into `out`.
template <class Draw>
std::vector<Moments> RunMonteCarlo(std::size_t samples, std::size_t dim,
                                   std::uint64_t seed, int threads, const Draw& draw) {
  const std::size_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<std::vector<Moments>> per_block(blocks, std::vector<Moments>(dim));
  auto run_block = [&](std::size_t b) {
    std::mt19937_64 rng(BlockSeed(seed, b));
    std::vector<double> out(dim);
    const std::size_t begin = b * kMonteCarloBlock;
    const std::size_t end = std::min(samples, begin + kMonteCarloBlock);
    for (std::size_t i = begin; i < end; ++i) {
      draw(rng, std::span<double>(out));
      for (std::size_t d = 0; d < dim; ++d) per_block[b][d].Add(out[d]);
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(blocks)));
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = w; b < blocks; b += workers) run_block(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  std::vector<Moments> total(dim);
  for (const auto& block : per_block) {
    for (std::size_t d = 0; d < dim; ++d) total[d].Merge(block[d]);
  }
  return total;
}

}  // namespace fwscale
