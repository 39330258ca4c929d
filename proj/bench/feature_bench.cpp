// Serial reference kernels vs the OpenMP kernels on frames shaped like the
// synthetic corpus. Run with OMP_NUM_THREADS to vary the thread count.

#include <benchmark/benchmark.h>

#include "bsedepth/features.hpp"
#include "bsedepth/roi.hpp"
#include "support.hpp"

using namespace bsedepth;
using namespace bsedepth::features;

namespace {

struct Batch {
  std::vector<GrayImage> images;
  BinaryMask roi;
  std::vector<FrameRef> refs;

  explicit Batch(int size, int count) : roi(roi::rect_mask(size, size, 8, 8, size / 2, size / 2)) {
    for (int i = 0; i < count; ++i) images.push_back(testing::random_gray(size, size, static_cast<std::uint64_t>(i)));
    for (const auto& im : images) refs.push_back({&im, &roi});
  }
};

const Batch& batch(int size) {
  static Batch b128(128, 64), b256(256, 16);
  return size == 128 ? b128 : b256;
}

void BM_LawsSerial(benchmark::State& state) {
  const auto& b = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::laws_histogram(b.images[0], b.roi));
}

void BM_LawsParallel(benchmark::State& state) {
  const auto& b = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(laws_histogram(b.images[0], b.roi));
}

void BM_LbpSerial(benchmark::State& state) {
  const auto& b = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::lbp_histogram(b.images[0], b.roi));
}

void BM_LbpParallel(benchmark::State& state) {
  const auto& b = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lbp_histogram(b.images[0], b.roi));
}

void BM_BatchSerial(benchmark::State& state) {
  const auto& b = batch(static_cast<int>(state.range(0)));
  const SchemeSet set({Scheme::Law, Scheme::LBP});
  for (auto _ : state) benchmark::DoNotOptimize(reference::extract_batch(b.refs, set));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.refs.size()));
}

void BM_BatchParallel(benchmark::State& state) {
  const auto& b = batch(static_cast<int>(state.range(0)));
  const SchemeSet set({Scheme::Law, Scheme::LBP});
  for (auto _ : state) benchmark::DoNotOptimize(extract_batch(b.refs, set));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.refs.size()));
}

}  // namespace

BENCHMARK(BM_LawsSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LawsParallel)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LbpSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LbpParallel)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BatchSerial)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
