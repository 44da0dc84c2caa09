#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "levylab/config.hpp"
#include "levylab/simulate.hpp"
#include "levylab/stats.hpp"

namespace levylab {

// Order-insensitive path farm: path i runs on the stream keyed by
// (seed, stream_base + i) and writes into slot i, so totals reduced in index
// order are identical for any worker count.
template <class T, class F>
std::vector<T> parallel_paths(long n, int workers, F&& fn) {
    std::vector<T> out(static_cast<std::size_t>(n));
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        while (true) {
            const long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

int resolve_workers(int configured);

struct BatchOptions {
    long n_paths = 1000;
    int workers = 1;
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;  // offset distinguishing sub-experiments
};

// batched stopping-time collectors (start point m_i unless given)
std::vector<ExitRecord> collect_sigma_records(const PathSimulator& sim,
                                              int well,
                                              const BatchOptions& opt);
std::vector<ExitRecord> collect_tau_records(const PathSimulator& sim, int well,
                                            const BatchOptions& opt);
std::vector<PathSimulator::TripleTimes> collect_triples(
    const PathSimulator& sim, int well, const BatchOptions& opt);
std::vector<ExitRecord> collect_saddle_records(const PathSimulator& sim,
                                               int saddle_j, double x0,
                                               const BatchOptions& opt);
// positions of n paths at the given model times (row per path)
std::vector<std::vector<double>> collect_positions(
    const PathSimulator& sim, double x0,
    const std::vector<double>& model_times, const BatchOptions& opt);
std::vector<PathSimulator::TubeResult> collect_tubes(const PathSimulator& sim,
                                                     double x0, double t_max,
                                                     const BatchOptions& opt);

ExitSample to_exit_sample(const std::vector<ExitRecord>& records, int well,
                          double eps, double rate);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<long> n_paths;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<ExperimentKind> kind;
};

struct RunOutcome {
    bool stats_pass = true;
    std::string report_path;
    std::string report_json;  // serialized report, as written
};

// Execute the configured experiment and write report.json, tables/*.csv and
// plotdata/*.dat under the output directory. Reports are deterministic
// functions of (config, seed); worker count never changes a byte.
RunOutcome run_experiment(const ExperimentConfig& cfg,
                          const RunOverrides& overrides = {});

}  // namespace levylab
