// Compares the parallel kernels against their serial reference on the
// bundled example and prints a small timing table. The parallel results must
// match the serial ones exactly; the benchmark aborts if they ever differ.

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include "rgseq/harness.hpp"
#include "rgseq/parallel.hpp"

using namespace rgseq;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_row(const std::string& name, double serial_s, double parallel_s, bool identical) {
  std::cout << std::left << std::setw(38) << name << std::right << std::fixed
            << std::setprecision(3) << std::setw(10) << serial_s << " s" << std::setw(10)
            << parallel_s << " s" << std::setw(9) << std::setprecision(2)
            << (parallel_s > 0.0 ? serial_s / parallel_s : 0.0) << "x   "
            << (identical ? "identical" : "MISMATCH") << "\n";
}

}  // namespace

int main() {
  const ProblemScenario fx = load_scenario(RGSEQ_DATA_DIR "/example_j9.json");
  const int workers = worker_count() > 0 ? worker_count() : 1;
  std::cout << "parallel workers: " << workers << "\n\n";
  std::cout << std::left << std::setw(38) << "kernel" << std::right << std::setw(12) << "serial"
            << std::setw(12) << "parallel" << std::setw(10) << "speedup"
            << "   result\n";

  bool all_identical = true;

  {
    auto t0 = std::chrono::steady_clock::now();
    const auto serial = exhaustive_optimum_serial(fx);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = exhaustive_optimum(fx);
    const double parallel_s = seconds_since(t0);

    const bool identical =
        serial.first == parallel.first && serial.second.value == parallel.second.value;
    all_identical = all_identical && identical;
    print_row("exhaustive scan of 9! sequences", serial_s, parallel_s, identical);
  }

  {
    RunConfig cfg;
    cfg.n_train = 60;
    cfg.m_candidates = 40;
    cfg.seed = 1;

    set_worker_count(1);
    auto t0 = std::chrono::steady_clock::now();
    const PipelineReport serial = run_pipeline(fx, cfg);
    const double serial_s = seconds_since(t0);

    set_worker_count(workers);
    t0 = std::chrono::steady_clock::now();
    const PipelineReport parallel = run_pipeline(fx, cfg);
    const double parallel_s = seconds_since(t0);

    const bool identical = report_to_json(serial).dump() == report_to_json(parallel).dump();
    all_identical = all_identical && identical;
    print_row("optimize pipeline (B=100)", serial_s, parallel_s, identical);
  }

  {
    SimulationConfig cfg;
    cfg.generator.task_count = 6;
    cfg.generator.concern_count = 8;
    cfg.replications = 24;
    cfg.seed = 9;
    cfg.starts = 3;
    GridCell cell;
    cell.n_train = 20;
    cell.m_candidates = 10;
    cfg.cells = {cell};

    set_worker_count(1);
    auto t0 = std::chrono::steady_clock::now();
    const SimulationSummary serial = simulate_grid(cfg);
    const double serial_s = seconds_since(t0);

    set_worker_count(workers);
    t0 = std::chrono::steady_clock::now();
    const SimulationSummary parallel = simulate_grid(cfg);
    const double parallel_s = seconds_since(t0);

    const bool identical = simulation_csv(serial) == simulation_csv(parallel);
    all_identical = all_identical && identical;
    print_row("simulation grid (24 replications)", serial_s, parallel_s, identical);
  }

  if (!all_identical) {
    std::cerr << "\nerror: a parallel kernel diverged from its serial reference\n";
    return 1;
  }
  return 0;
}
