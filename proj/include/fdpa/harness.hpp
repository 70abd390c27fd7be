// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo orchestration. Drops are embarrassingly parallel; every drop
// owns counter-derived RNG streams, results land in preallocated slots, and
// the emitted CSV bytes are a pure function of (spec, master_seed) regardless
// of backend or worker count. The serial backend is the reference
// implementation the OpenMP path is tested against.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fdpa/config.hpp"
#include "fdpa/hd_baseline.hpp"
#include "fdpa/moop.hpp"

namespace fdpa {

enum class RunBackend { serial, openmp };

struct ExperimentSpec {
  enum class Mode { frontier, sinr_sweep };
  Mode mode = Mode::frontier;
  SystemConfig system;
  SweepConfig sweep;
  Eigen::Vector2d lambda{0.1, 0.9};  // sinr_sweep mode only
  SolverOptions solver;

  std::vector<std::string> check() const;  // mode-specific invariants
};

struct AggregateRow {
  std::string status;      // "FD" or "HD"
  double group_key = 0.0;  // N_T (frontier) or downlink target dB (sinr sweep)
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
  double mean_dl_w = 0.0;
  double mean_ul_w = 0.0;
  int feasible_drops = 0;
  int total_drops = 0;

  bool has_mean() const { return feasible_drops > 0; }
};

/// One drop's contribution to one aggregation cell.
struct DropPoint {
  double dl_w = 0.0;
  double ul_w = 0.0;
  bool feasible = false;
};

/// Means over feasible drops, in watts (converted to dBm only on output).
AggregateRow aggregate_cell(const std::string& status, double group_key,
                            double lambda1, double lambda2,
                            const std::vector<DropPoint>& drops);

struct RunResult {
  std::vector<AggregateRow> aggregate;
  std::string per_point_csv;
  std::string aggregate_csv;
  std::string manifest;
  CertificateStats cert;
  int infeasible_drops = 0;  // across all groups
  int failed_drops = 0;      // solver errors (not plain infeasibility)
  int total_drop_runs = 0;
};

RunResult run_frontier(const ExperimentSpec& spec,
                       RunBackend backend = RunBackend::openmp, int jobs = 0);
RunResult run_sinr_sweep(const ExperimentSpec& spec,
                         RunBackend backend = RunBackend::openmp, int jobs = 0);
RunResult run_experiment(const ExperimentSpec& spec,
                         RunBackend backend = RunBackend::openmp, int jobs = 0);

/// Writes per-point CSV, aggregate CSV, and the run manifest into dir.
void write_run_artifacts(const RunResult& run, const std::string& dir,
                         const std::string& prefix);

extern const char* const kCodeVersion;

}  // namespace fdpa
