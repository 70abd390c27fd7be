// SPDX-License-Identifier: Apache-2.0
//
// Weighted-Tchebycheff sweep over the scalarization weights: anchors from
// the two single-objective problems, one scalarized solve per grid weight,
// rank-one extraction and certificate verification per point.

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdpa/recovery.hpp"
#include "fdpa/sdp_builder.hpp"
#include "fdpa/solver.hpp"

namespace fdpa {

/// Worst-case certificate metrics accumulated over a set of optimal solves.
struct CertificateStats {
  int solves = 0;
  double gap_max = 0.0;
  double residual_primal_max = 0.0;
  double residual_dual_max = 0.0;
  double complementarity_max = 0.0;
  double stationarity_max = 0.0;
  double dual_sign_min = 0.0;
  double theta_sum_err_max = 0.0;

  void absorb(const SolverResult& result, const KktCheck& chk);
  void merge(const CertificateStats& other);
};

struct Anchors {
  double q1 = 0.0;  // optimal total downlink power, watts
  double q2 = 0.0;  // optimal total uplink power, watts
  SolveStatus status_p1 = SolveStatus::numerical_failure;
  SolveStatus status_p2 = SolveStatus::numerical_failure;

  bool ok() const {
    return status_p1 == SolveStatus::optimal && status_p2 == SolveStatus::optimal;
  }
  std::string failure() const;
};

struct ParetoPoint {
  Eigen::Vector2d lambda{0.0, 0.0};
  double dl_power = 0.0;  // sum ||w_k||^2, watts
  double ul_power = 0.0;  // sum P_j, watts
  double t_value = 0.0;
  bool certificate_ok = false;
  double eigen_ratio_max = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  std::string note;  // which check failed, when not certified
};

struct Frontier {
  Eigen::Vector2d anchors{0.0, 0.0};
  std::vector<ParetoPoint> points;  // lambda_1 ascending
  bool feasible = false;            // anchors solved to optimality
  std::string note;
  CertificateStats cert;
};

Anchors compute_anchors(const ChannelRealization& ch, const ReceiveBank& bank,
                        const Targets& targets, const SolverOptions& opts = {});

/// One scalarized solve; fills a ParetoPoint and (optionally) certificate
/// stats. Exposed separately so single-point experiments reuse it.
ParetoPoint solve_tcheby_point(const ChannelRealization& ch,
                               const ReceiveBank& bank, const Targets& targets,
                               const Eigen::Vector2d& lambda,
                               const Eigen::Vector2d& q_star,
                               const SolverOptions& opts,
                               CertificateStats* stats);

/// Full sweep: lambda_1 = i * lambda_step with exact endpoints. Per-point
/// failures are recorded in the point; the sweep continues. `parallel`
/// distributes grid points over OpenMP threads; output is identical either
/// way.
Frontier sweep(const ChannelRealization& ch, const ReceiveBank& bank,
               const Targets& targets, double lambda_step,
               const SolverOptions& opts = {}, bool parallel = false);

/// CSV: lambda1,lambda2,dl_power_dbm,ul_power_dbm,t,status,max_eigen_ratio
void write_frontier_csv(std::ostream& os, const Frontier& frontier);

const char* pareto_status_name(const ParetoPoint& pt);

}  // namespace fdpa
