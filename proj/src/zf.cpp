// SPDX-License-Identifier: Apache-2.0

#include "fdpa/zf.hpp"

#include <stdexcept>

namespace fdpa {

ReceiveBank build_zf(const std::vector<Eigen::VectorXcd>& g) {
  ReceiveBank bank;
  const int j_users = static_cast<int>(g.size());
  if (j_users == 0) return bank;
  const int nt = static_cast<int>(g[0].size());
  if (nt < j_users)
    throw std::runtime_error("build_zf: N_T >= J required for zero forcing");

  bank.q.resize(nt, j_users);
  for (int j = 0; j < j_users; ++j) bank.q.col(j) = g[static_cast<std::size_t>(j)];

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      bank.q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12)
    throw std::runtime_error("degenerate uplink channels");

  bank.q_pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() *
                svd.matrixU().adjoint();
  bank.v.reserve(static_cast<std::size_t>(j_users));
  for (int j = 0; j < j_users; ++j)
    bank.v.push_back(bank.q_pinv.row(j).adjoint());
  return bank;
}

namespace {

// |a^H w|^2 in vector form, Re tr(a a^H W) in lifted form.
double quad_form(const Eigen::VectorXcd& a, const CandidateSolution& sol, int k) {
  if (sol.has_lifted()) {
    const Eigen::MatrixXcd& wk = sol.w_lifted[static_cast<std::size_t>(k)];
    return (a.adjoint() * wk * a).real()(0, 0);
  }
  return std::norm(a.dot(sol.w[static_cast<std::size_t>(k)]));
}

int num_beams(const CandidateSolution& sol) {
  return static_cast<int>(sol.has_lifted() ? sol.w_lifted.size() : sol.w.size());
}

}  // namespace

Eigen::VectorXd sinr_downlink(const ChannelRealization& ch,
                              const CandidateSolution& sol) {
  const int k_users = ch.num_dl();
  const int j_users = ch.num_ul();
  Eigen::VectorXd out(k_users);
  for (int k = 0; k < k_users; ++k) {
    const Eigen::VectorXcd& hk = ch.h[static_cast<std::size_t>(k)];
    double signal = quad_form(hk, sol, k);
    double denom = ch.sigma2_dl(k);
    for (int m = 0; m < num_beams(sol); ++m)
      if (m != k) denom += quad_form(hk, sol, m);
    for (int j = 0; j < j_users; ++j)
      denom += sol.p(j) * std::norm(ch.f(j, k));
    out(k) = signal / denom;
  }
  return out;
}

Eigen::VectorXd sinr_uplink(const ChannelRealization& ch,
                            const ReceiveBank& bank,
                            const CandidateSolution& sol) {
  const int j_users = ch.num_ul();
  Eigen::VectorXd out(j_users);
  for (int j = 0; j < j_users; ++j) {
    const Eigen::VectorXcd& vj = bank.v[static_cast<std::size_t>(j)];
    const double signal =
        sol.p(j) * std::norm(ch.g[static_cast<std::size_t>(j)].dot(vj));
    double denom = ch.sigma2_ul * vj.squaredNorm();
    for (int r = 0; r < j_users; ++r)
      if (r != j)
        denom += sol.p(r) * std::norm(ch.g[static_cast<std::size_t>(r)].dot(vj));
    if (num_beams(sol) > 0) {
      const Eigen::VectorXcd leak = ch.h_si.adjoint() * vj;  // (v^H H_SI)^H
      for (int k = 0; k < num_beams(sol); ++k)
        denom += quad_form(leak, sol, k);
    }
    out(j) = signal / denom;
  }
  return out;
}

}  // namespace fdpa
