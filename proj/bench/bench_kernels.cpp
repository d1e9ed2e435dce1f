#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dtc/kernels.hpp"

namespace k = dtc::kernels;

namespace {

std::vector<double> randn(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// (d, d, d, n) tensor contracted on mode 1, the shape of a simulation fit.
k::ModeView shape(const benchmark::State& st) {
  const auto d = static_cast<std::size_t>(st.range(0));
  return {d, d, d * 100};
}

template <auto Fn>
void contract(benchmark::State& st) {
  const auto s = shape(st);
  const auto in = randn(s.left * s.mid * s.right);
  const auto v = randn(s.mid);
  std::vector<double> out(s.left * s.right);
  for (auto _ : st) {
    Fn(in, s, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetBytesProcessed(static_cast<std::int64_t>(st.iterations() * in.size() * sizeof(double)));
}

template <auto Fn>
void multiply(benchmark::State& st) {
  const auto s = shape(st);
  const auto in = randn(s.left * s.mid * s.right);
  const Eigen::MatrixXd M = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(s.mid), static_cast<Eigen::Index>(s.mid));
  std::vector<double> out(in.size());
  for (auto _ : st) {
    Fn(in, s, M, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void squares(benchmark::State& st) {
  const auto s = shape(st);
  const auto in = randn(s.left * s.mid * s.right);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(in));
}

template <auto Fn>
void outer(benchmark::State& st) {
  const auto s = shape(st);
  const auto prefix = randn(s.left * s.mid);
  const auto tail = randn(s.right);
  std::vector<double> data(prefix.size() * tail.size(), 0.0);
  for (auto _ : st) {
    Fn(data, 0.5, prefix, tail);
    benchmark::DoNotOptimize(data.data());
  }
}

}  // namespace

BENCHMARK(contract<k::serial::contract_mode>)->Arg(10)->Arg(20);
BENCHMARK(contract<k::omp::contract_mode>)->Arg(10)->Arg(20);
BENCHMARK(multiply<k::serial::mode_multiply>)->Arg(10)->Arg(20);
BENCHMARK(multiply<k::omp::mode_multiply>)->Arg(10)->Arg(20);
BENCHMARK(squares<k::serial::sum_squares>)->Arg(10)->Arg(20);
BENCHMARK(squares<k::omp::sum_squares>)->Arg(10)->Arg(20);
BENCHMARK(outer<k::serial::add_outer>)->Arg(10)->Arg(20);
BENCHMARK(outer<k::omp::add_outer>)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
