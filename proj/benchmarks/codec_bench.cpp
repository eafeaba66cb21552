#include <benchmark/benchmark.h>

#include "iodeep/dicom/codec.hpp"
#include "iodeep/dicom/file.hpp"
#include "iodeep/synthetic.hpp"

using namespace iodeep;

namespace {

const dicom::DataSet& slice() {
  static const auto ds = synthetic::generate_series(1, 1).images[0];
  return ds;
}

void BM_EncodeSlice(benchmark::State& state) {
  std::size_t bytes = 0;
  for (auto _ : state) {
    auto out = dicom::encode_dataset(slice());
    bytes = out.size();
    benchmark::DoNotOptimize(out);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_EncodeSlice);

void BM_DecodeSlice(benchmark::State& state) {
  const auto bytes = dicom::encode_dataset(slice());
  for (auto _ : state) benchmark::DoNotOptimize(dicom::decode_dataset(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_DecodeSlice);

void BM_DecodeFile(benchmark::State& state) {
  const auto bytes = dicom::encode_file(dicom::DicomFile::from_body(slice()));
  for (auto _ : state) benchmark::DoNotOptimize(dicom::decode_file(bytes));
}
BENCHMARK(BM_DecodeFile);

}  // namespace

BENCHMARK_MAIN();
