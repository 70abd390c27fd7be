// SPDX-License-Identifier: Apache-2.0

#include "fdpa/sdp_builder.hpp"

#include <cmath>
#include <stdexcept>

namespace fdpa {

Targets Targets::from_config(const SystemConfig& cfg) {
  Targets t;
  t.gamma_dl.resize(cfg.num_dl_users);
  for (int k = 0; k < cfg.num_dl_users; ++k)
    t.gamma_dl(k) = cfg.sinr_target_dl_linear(k);
  t.gamma_ul.resize(cfg.num_ul_users);
  for (int j = 0; j < cfg.num_ul_users; ++j)
    t.gamma_ul(j) = cfg.sinr_target_ul_linear(j);
  return t;
}

void TchebyParams::check() const {
  if (lambda(0) < 0.0 || lambda(1) < 0.0)
    throw std::invalid_argument("Tchebycheff weights must be nonnegative");
  if (std::abs(lambda(0) + lambda(1) - 1.0) > 1e-12)
    throw std::invalid_argument("Tchebycheff weights must sum to 1");
}

namespace {

void normalize_row(ConstraintRow& row) {
  const double d = std::abs(row.rhs);
  if (d <= 0.0) return;
  row.scale = d;
  for (auto& m : row.w_coeff) m /= d;
  row.p_coeff /= d;
  row.t_coeff /= d;
  row.rhs /= d;
}

/// Shared skeleton: dimensions, certificate data, and the QoS rows C~1/C~2.
ConicProblem base_problem(const ChannelRealization& ch, const ReceiveBank& bank,
                          const Targets& targets) {
  const int nt = ch.nt();
  const int k_users = ch.num_dl();
  const int j_users = ch.num_ul();
  if (targets.gamma_dl.size() != k_users || targets.gamma_ul.size() != j_users)
    throw std::invalid_argument("targets do not match channel dimensions");

  ConicProblem prob;
  prob.nt = nt;
  prob.num_dl = k_users;
  prob.num_ul = j_users;
  prob.gamma_dl = targets.gamma_dl;
  prob.gamma_ul = targets.gamma_ul;

  prob.h_outer.reserve(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    const auto& hk = ch.h[static_cast<std::size_t>(k)];
    prob.h_outer.push_back(hk * hk.adjoint());
  }
  // H_SI^H V_j H_SI = u_j u_j^H with u_j = H_SI^H v_j: exactly Hermitian.
  prob.si_outer.reserve(static_cast<std::size_t>(j_users));
  for (int j = 0; j < j_users; ++j) {
    const Eigen::VectorXcd u = ch.h_si.adjoint() * bank.v[static_cast<std::size_t>(j)];
    prob.si_outer.push_back(u * u.adjoint());
  }

  prob.obj_w.assign(static_cast<std::size_t>(k_users),
                    Eigen::MatrixXcd::Zero(nt, nt));
  prob.obj_p = Eigen::VectorXd::Zero(j_users);

  // C~1, one row per downlink user:
  //   <H_k/Gamma_k, W_k> - sum_{m!=k} <H_k, W_m> - sum_j |f_jk|^2 P_j >= sigma2_k.
  for (int k = 0; k < k_users; ++k) {
    ConstraintRow row;
    row.kind = RowKind::qos_dl;
    row.index = k;
    row.w_coeff.reserve(static_cast<std::size_t>(k_users));
    for (int m = 0; m < k_users; ++m) {
      Eigen::MatrixXcd coef = prob.h_outer[static_cast<std::size_t>(k)];
      if (m == k)
        coef /= targets.gamma_dl(k);
      else
        coef = -coef;
      row.w_coeff.push_back(std::move(coef));
    }
    row.p_coeff = Eigen::VectorXd::Zero(j_users);
    for (int j = 0; j < j_users; ++j) row.p_coeff(j) = -std::norm(ch.f(j, k));
    row.rhs = ch.sigma2_dl(k);
    normalize_row(row);
    prob.rows.push_back(std::move(row));
  }

  // C~2, one row per uplink user:
  //   P_j <V_j G_j>/Gamma_j - sum_{r!=j} P_r <V_j G_r>
  //     - sum_k <H_SI^H V_j H_SI, W_k> >= sigma2_z ||v_j||^2.
  for (int j = 0; j < j_users; ++j) {
    const auto& vj = bank.v[static_cast<std::size_t>(j)];
    ConstraintRow row;
    row.kind = RowKind::qos_ul;
    row.index = j;
    row.w_coeff.assign(static_cast<std::size_t>(k_users),
                       -prob.si_outer[static_cast<std::size_t>(j)]);
    row.p_coeff = Eigen::VectorXd::Zero(j_users);
    for (int r = 0; r < j_users; ++r) {
      const double coupling = std::norm(ch.g[static_cast<std::size_t>(r)].dot(vj));
      row.p_coeff(r) = (r == j) ? coupling / targets.gamma_ul(j) : -coupling;
    }
    row.rhs = ch.sigma2_ul * vj.squaredNorm();
    normalize_row(row);
    prob.rows.push_back(std::move(row));
  }
  return prob;
}

}  // namespace

ConicProblem build_problem1(const ChannelRealization& ch, const ReceiveBank& bank,
                            const Targets& targets) {
  ConicProblem prob = base_problem(ch, bank, targets);
  for (auto& c : prob.obj_w)
    c = Eigen::MatrixXcd::Identity(prob.nt, prob.nt);
  return prob;
}

ConicProblem build_problem2(const ChannelRealization& ch, const ReceiveBank& bank,
                            const Targets& targets) {
  ConicProblem prob = base_problem(ch, bank, targets);
  prob.obj_p.setOnes();
  return prob;
}

ConicProblem build_problem3(const ChannelRealization& ch, const ReceiveBank& bank,
                            const Targets& targets, const TchebyParams& tcheby) {
  tcheby.check();
  ConicProblem prob = base_problem(ch, bank, targets);
  prob.has_t = true;
  prob.obj_t = 1.0;
  prob.lambda = tcheby.lambda;
  prob.q_star = tcheby.q_star;

  // C~6: t - lambda_i Q_i >= -lambda_i Q_i^*, i = 1 (downlink), 2 (uplink).
  for (int i = 0; i < 2; ++i) {
    ConstraintRow row;
    row.kind = RowKind::tcheby;
    row.index = i;
    row.t_coeff = 1.0;
    row.w_coeff.assign(static_cast<std::size_t>(prob.num_dl),
                       Eigen::MatrixXcd::Zero(prob.nt, prob.nt));
    row.p_coeff = Eigen::VectorXd::Zero(prob.num_ul);
    if (i == 0) {
      for (auto& m : row.w_coeff)
        m = -tcheby.lambda(0) * Eigen::MatrixXcd::Identity(prob.nt, prob.nt);
    } else {
      row.p_coeff.setConstant(-tcheby.lambda(1));
    }
    row.rhs = -tcheby.lambda(i) * tcheby.q_star(i);
    normalize_row(row);
    prob.rows.push_back(std::move(row));
  }
  return prob;
}

}  // namespace fdpa
