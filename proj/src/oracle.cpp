// SPDX-License-Identifier: Apache-2.0

#include "fdpa/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "fdpa/rng.hpp"
#include "fdpa/zf.hpp"

namespace fdpa {

DecoupledInstance make_decoupled_instance() {
  DecoupledInstance inst;
  ChannelRealization& ch = inst.ch;
  ch.h.push_back((Eigen::VectorXcd(2) << 1.0, 0.0).finished());
  ch.g.push_back((Eigen::VectorXcd(2) << 0.0, 1.0).finished());
  ch.f.resize(1, 1);
  ch.f(0, 0) = std::sqrt(0.1);
  ch.h_si = Eigen::MatrixXcd::Identity(2, 2);
  ch.sigma2_dl = Eigen::VectorXd::Ones(1);
  ch.sigma2_ul = 1.0;
  inst.bank = build_zf(ch.g);
  inst.targets.gamma_dl = Eigen::VectorXd::Ones(1);
  inst.targets.gamma_ul = Eigen::VectorXd::Ones(1);
  return inst;
}

DecoupledCheck run_decoupled_oracle(double lambda_step, const SolverOptions& opts) {
  const DecoupledInstance inst = make_decoupled_instance();
  DecoupledCheck chk;
  const Frontier fr =
      sweep(inst.ch, inst.bank, inst.targets, lambda_step, opts, false);
  if (!fr.feasible) {
    chk.note = "anchors failed: " + fr.note;
    return chk;
  }
  chk.passed = true;
  for (const ParetoPoint& pt : fr.points) {
    ++chk.points;
    if (pt.status != SolveStatus::optimal || !pt.certificate_ok) {
      chk.passed = false;
      chk.note = std::string("point not certified at lambda1=") +
                 std::to_string(pt.lambda(0));
      continue;
    }
    chk.max_dl_dev = std::max(
        chk.max_dl_dev, std::abs(pt.dl_power - chk.expected_dl) / chk.expected_dl);
    chk.max_ul_dev = std::max(
        chk.max_ul_dev, std::abs(pt.ul_power - chk.expected_ul) / chk.expected_ul);
  }
  if (chk.max_dl_dev > 1e-6 || chk.max_ul_dev > 1e-6) {
    chk.passed = false;
    chk.note = "deviation above 1e-6";
  }
  return chk;
}

ChannelRealization make_small_instance(std::uint64_t seed) {
  ChannelRealization ch;
  StreamRng rng(seed, 0, StreamKind::generic);
  auto cvec = [&](int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
    return v;
  };
  ch.h.push_back(cvec(2));
  ch.g.push_back(cvec(2));
  ch.f.resize(1, 1);
  ch.f(0, 0) = 0.3 * rng.complex_normal();
  ch.h_si.resize(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) ch.h_si(r, c) = 0.2 * rng.complex_normal();
  ch.sigma2_dl = Eigen::VectorXd::Ones(1);
  ch.sigma2_ul = 1.0;
  return ch;
}

namespace {

struct GridPoint {
  double beta = 0.0, phi = 0.0, psi = 0.0, p = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

struct SearchContext {
  const ChannelRealization* ch = nullptr;
  const ReceiveBank* bank = nullptr;
  const Targets* targets = nullptr;
  Eigen::Vector2d lambda, q_star;
  // Precomputed single-user quantities.
  Eigen::VectorXcd h, g, v, si_leak;  // si_leak = H_SI^H v
  double f2 = 0.0, s2_dl = 0.0, s2_ul = 0.0, vg2 = 0.0, vnorm2 = 0.0;
};

GridPoint evaluate_point(const SearchContext& cx, double beta, double phi,
                         double psi, double p) {
  GridPoint pt;
  pt.beta = beta;
  pt.phi = phi;
  pt.psi = psi;
  pt.p = p;

  Eigen::VectorXcd w(2);
  w(0) = beta * std::cos(phi);
  w(1) = beta * std::sin(phi) * std::complex<double>(std::cos(psi), std::sin(psi));

  const double signal_dl = std::norm(cx.h.dot(w));
  const double gamma_dl = signal_dl / (p * cx.f2 + cx.s2_dl);
  if (gamma_dl < cx.targets->gamma_dl(0)) return pt;

  const double si = std::norm(cx.si_leak.dot(w));
  const double gamma_ul = p * cx.vg2 / (si + cx.s2_ul * cx.vnorm2);
  if (gamma_ul < cx.targets->gamma_ul(0)) return pt;

  pt.feasible = true;
  const double q1 = beta * beta;
  pt.objective = std::max(cx.lambda(0) * (q1 - cx.q_star(0)),
                          cx.lambda(1) * (p - cx.q_star(1)));
  return pt;
}

}  // namespace

BruteForceResult brute_force_tcheby(const ChannelRealization& ch,
                                    const ReceiveBank& bank,
                                    const Targets& targets,
                                    const Eigen::Vector2d& lambda,
                                    const Eigen::Vector2d& q_star,
                                    const BruteForceOptions& opts) {
  SearchContext cx;
  cx.ch = &ch;
  cx.bank = &bank;
  cx.targets = &targets;
  cx.lambda = lambda;
  cx.q_star = q_star;
  cx.h = ch.h[0];
  cx.g = ch.g[0];
  cx.v = bank.v[0];
  cx.si_leak = ch.h_si.adjoint() * cx.v;
  cx.f2 = std::norm(ch.f(0, 0));
  cx.s2_dl = ch.sigma2_dl(0);
  cx.s2_ul = ch.sigma2_ul;
  cx.vg2 = std::norm(cx.g.dot(cx.v));
  cx.vnorm2 = cx.v.squaredNorm();

  // Linear bound pair: the optimum satisfies ||w||^2 <= a + b P (served via
  // full alignment) and P <= c + d ||w||^2 (worst-case SI leakage).
  const double a = targets.gamma_dl(0) * cx.s2_dl / cx.h.squaredNorm();
  const double b = targets.gamma_dl(0) * cx.f2 / cx.h.squaredNorm();
  const double c = targets.gamma_ul(0) * cx.s2_ul * cx.vnorm2 / cx.vg2;
  const double d = targets.gamma_ul(0) * cx.si_leak.squaredNorm() / cx.vg2;
  BruteForceResult out;
  if (b * d >= 1.0) return out;  // runaway interference loop; no finite box
  const double beta2_hi = opts.range_safety * (a + b * c) / (1.0 - b * d);
  const double p_hi = opts.range_safety * (c + d * beta2_hi);

  struct Window {
    double lo[4];
    double hi[4];
  };
  constexpr double kPi = 3.14159265358979323846;
  const double beta_hi = std::sqrt(beta2_hi);
  const Window global{{0.0, 0.0, 0.0, 0.0},
                      {beta_hi, kPi / 2.0, 2.0 * kPi, p_hi}};
  std::vector<Window> windows = {global};
  double span[4] = {beta_hi, kPi / 2.0, 2.0 * kPi, p_hi};

  GridPoint best;
  const int n = opts.grid;
  for (int pass = 0; pass < opts.passes; ++pass) {
    std::vector<GridPoint> kept;
    for (const Window& win : windows) {
      double step[4];
      for (int d4 = 0; d4 < 4; ++d4) step[d4] = (win.hi[d4] - win.lo[d4]) / (n - 1);
      for (int ib = 0; ib < n; ++ib)
        for (int ip = 0; ip < n; ++ip)
          for (int is = 0; is < n; ++is)
            for (int iq = 0; iq < n; ++iq) {
              GridPoint pt = evaluate_point(
                  cx, win.lo[0] + ib * step[0], win.lo[1] + ip * step[1],
                  win.lo[2] + is * step[2], win.lo[3] + iq * step[3]);
              if (!pt.feasible) continue;
              if (pt.objective < best.objective) best = pt;
              kept.push_back(pt);
            }
    }
    if (kept.empty()) return out;
    if (pass + 1 == opts.passes) break;

    std::sort(kept.begin(), kept.end(),
              [](const GridPoint& x, const GridPoint& y) {
                return x.objective < y.objective;
              });
    kept.resize(std::min<std::size_t>(kept.size(),
                                      static_cast<std::size_t>(opts.keep)));

    // Refine: +-2 current grid steps around each kept cell, clipped to the
    // global box; resolution improves 5x per pass.
    for (int d4 = 0; d4 < 4; ++d4) span[d4] *= 4.0 / (n - 1);
    windows.clear();
    for (const GridPoint& pt : kept) {
      const double center[4] = {pt.beta, pt.phi, pt.psi, pt.p};
      Window win;
      for (int d4 = 0; d4 < 4; ++d4) {
        win.lo[d4] = std::max(global.lo[d4], center[d4] - 0.5 * span[d4]);
        win.hi[d4] = std::min(global.hi[d4], center[d4] + 0.5 * span[d4]);
      }
      windows.push_back(win);
    }
  }

  out.feasible = best.feasible;
  out.objective = best.objective;
  out.q1 = best.beta * best.beta;
  out.q2 = best.p;
  return out;
}

}  // namespace fdpa
