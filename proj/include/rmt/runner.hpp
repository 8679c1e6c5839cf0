#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/estimators.hpp"
#include "rmt/spectrum.hpp"

// Reproducible parallel Monte Carlo over trial indices. Workers steal trial
// indices from a shared counter; every trial draws from its own RNG stream
// and writes into its own slot (or into per-worker integer histograms), so
// results are bit-identical for any thread count.

namespace rmt {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RMT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

// body(trial, worker) must only touch worker-local or trial-slot state.
template <typename Body>
void parallel_trials(int trials, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, trials));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  int error_trial = trials;
  std::string error_message;

  auto worker = [&](int worker_id) {
    while (!failed.load(std::memory_order_relaxed)) {
      const int trial = next.fetch_add(1, std::memory_order_relaxed);
      if (trial >= trials) break;
      try {
        body(trial, worker_id);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (trial < error_trial) {
          error_trial = trial;
          error_message = e.what();
        }
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  if (error_trial < trials) {
    std::ostringstream msg;
    msg << "trial " << error_trial << " (stream " << error_trial
        << "): " << error_message;
    throw NumericalError(msg.str());
  }
}

}  // namespace detail

struct EnsembleRun {
  std::vector<Spectrum> spectra;         // indexed by trial
  std::vector<double> trace_residuals;   // |sum eig - trace| per trial
  int trace_flagged = 0;                 // relative trace error > 1e-6
  double elapsed_seconds = 0.0;
};

inline EnsembleRun run_ensemble(const EnsembleSpec& spec, std::uint64_t seed,
                                int trials, int threads) {
  validate(spec);
  if (trials < 1) throw ConfigError("run_ensemble: trials must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  EnsembleRun run;
  run.spectra.resize(trials);
  run.trace_residuals.resize(trials);
  std::vector<char> flagged(trials, 0);

  detail::parallel_trials(trials, resolve_threads(threads), [&](int trial, int) {
    const MatrixX<double> x = sample(spec, RngStream{seed, static_cast<std::uint64_t>(trial)});
    EigenReport report = compute_spectrum(x);
    flagged[trial] = report.trace_flagged(x.norm(), spec.n) ? 1 : 0;
    run.trace_residuals[trial] = report.residual;
    run.spectra[trial] = std::move(report.spectrum);
  });

  for (char f : flagged) run.trace_flagged += f;
  run.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

struct HistRun {
  RealAxisAccumulator real;
  std::optional<StripAccumulator> strip;
  int trace_flagged = 0;
  double elapsed_seconds = 0.0;

  HistRun(const HistSpec& h, const ExclusionPolicy& p) : real(h, p) {}
};

// Streaming variant: accumulates histograms per worker and merges them, never
// materializing the spectra. Suits full paper-scale runs (1e4 x n=1000).
inline HistRun run_ensemble_hist(const EnsembleSpec& spec, std::uint64_t seed,
                                 int trials, int threads, const HistSpec& hist,
                                 const ExclusionPolicy& policy,
                                 const std::optional<StripSpec>& strip) {
  validate(spec);
  if (trials < 1) throw ConfigError("run_ensemble_hist: trials must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int nthreads = resolve_threads(threads);

  struct WorkerState {
    RealAxisAccumulator real;
    std::optional<StripAccumulator> strip;
    int flagged = 0;
  };
  std::vector<WorkerState> states;
  states.reserve(std::max(1, std::min(nthreads, trials)));
  for (int w = 0; w < std::max(1, std::min(nthreads, trials)); ++w) {
    WorkerState st{RealAxisAccumulator(hist, policy), std::nullopt, 0};
    if (strip) st.strip.emplace(hist, *strip);
    states.push_back(std::move(st));
  }

  detail::parallel_trials(trials, nthreads, [&](int trial, int worker) {
    const MatrixX<double> x = sample(spec, RngStream{seed, static_cast<std::uint64_t>(trial)});
    EigenReport report = compute_spectrum(x);
    WorkerState& st = states[worker];
    st.real.add(report.spectrum);
    if (st.strip) st.strip->add(report.spectrum);
    if (report.trace_flagged(x.norm(), spec.n)) ++st.flagged;
  });

  HistRun run(hist, policy);
  if (strip) run.strip.emplace(hist, *strip);
  for (const WorkerState& st : states) {
    run.real.merge(st.real);
    if (run.strip) run.strip->merge(*st.strip);
    run.trace_flagged += st.flagged;
  }
  run.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace rmt
