// Benchmark: serial reference executor vs the OpenMP cell loop, on a
// latency-bound adapter (sleeping proxy for a remote endpoint) and on the
// CPU-bound perfect adder. Prints wall time and speedup per thread count.

#include <chrono>
#include <cstdio>
#include <thread>

#include "symgauntlet/modelio.hpp"
#include "symgauntlet/runner.hpp"

using namespace symgauntlet;

namespace {

class FixedLatencyAdapter final : public modelio::ModelAdapter {
 public:
  explicit FixedLatencyAdapter(std::chrono::microseconds delay)
      : delay_(delay) {}
  std::string complete(const std::string& prompt,
                       const modelio::ModelParams& params,
                       std::uint64_t nonce) override {
    std::this_thread::sleep_for(delay_);
    return inner_.complete(prompt, params, nonce);
  }
  std::string descriptor() const override { return "bench:latency"; }

 private:
  modelio::PerfectAdder inner_;
  std::chrono::microseconds delay_;
};

double run_once(const std::vector<runner::Case>& cases,
                modelio::ModelAdapter& adapter, int trials, int threads,
                runner::ExecMode mode) {
  const modelio::ModelParams params;
  const auto t0 = std::chrono::steady_clock::now();
  const auto records =
      runner::run_cells(cases, {&adapter}, params, trials, false, threads, mode);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  std::size_t correct = 0;
  for (const auto& rec : records) correct += rec.correct ? 1 : 0;
  if (correct != records.size()) {
    std::fprintf(stderr, "unexpected incorrect records: %zu/%zu\n",
                 records.size() - correct, records.size());
  }
  return elapsed;
}

void bench(const char* label, const std::vector<runner::Case>& cases,
           modelio::ModelAdapter& adapter, int trials) {
  std::printf("\n%s (%zu cases x %d trials = %zu cells)\n", label, cases.size(),
              trials, cases.size() * static_cast<std::size_t>(trials));
  std::printf("  %-22s %10s %9s\n", "executor", "wall [s]", "speedup");
  const double serial =
      run_once(cases, adapter, trials, 1, runner::ExecMode::Serial);
  std::printf("  %-22s %10.3f %9s\n", "serial reference", serial, "1.00x");
  for (int threads : {2, 4, 8}) {
    const double t =
        run_once(cases, adapter, trials, threads, runner::ExecMode::Parallel);
    std::printf("  openmp, %2d threads     %10.3f %8.2fx\n", threads, t,
                serial / t);
  }
}

}  // namespace

int main() {
  runner::ExperimentConfig latency_config;
  latency_config.families = {"closure"};
  latency_config.lengths = runner::LengthRange{5, 150, 5};
  const auto latency_cases = runner::build_cases(latency_config);
  FixedLatencyAdapter latency(std::chrono::microseconds(2000));
  bench("latency-bound (2ms fixed-latency adapter)", latency_cases, latency, 4);

  runner::ExperimentConfig cpu_config;
  cpu_config.families = {"closure", "identity", "inverse", "associativity"};
  cpu_config.lengths = runner::LengthRange{5, 150, 5};
  const auto cpu_cases = runner::build_cases(cpu_config);
  modelio::PerfectAdder perfect;
  bench("cpu-bound (perfect adder)", cpu_cases, perfect, 10);
  return 0;
}
