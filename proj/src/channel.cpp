// SPDX-License-Identifier: Apache-2.0

#include "fdpa/channel.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fdpa/units.hpp"

namespace fdpa {

namespace {

constexpr double kSpeedOfLight = 2.998e8;  // m/s
constexpr double kTwoPi = 6.283185307179586477;

Eigen::VectorXcd faded_vector(int n, double linear_gain, StreamRng& rng) {
  Eigen::VectorXcd v(n);
  const double amp = std::sqrt(linear_gain);
  for (int i = 0; i < n; ++i) v(i) = amp * rng.complex_normal();
  return v;
}

}  // namespace

double path_loss_db(double distance, const SystemConfig& cfg, bool bs_link) {
  if (distance < cfg.reference_distance)
    throw std::domain_error("path_loss_db: distance below reference distance");
  const double fspl_ref =
      20.0 * std::log10(4.0 * M_PI * cfg.reference_distance *
                        cfg.carrier_frequency / kSpeedOfLight);
  double pl = fspl_ref + 10.0 * cfg.pathloss_exponent *
                             std::log10(distance / cfg.reference_distance);
  if (bs_link) pl -= cfg.antenna_gain;
  return pl;
}

double user_distance(const PolarPosition& a, const PolarPosition& b) {
  const double dx = a.radius * std::cos(a.angle) - b.radius * std::cos(b.angle);
  const double dy = a.radius * std::sin(a.angle) - b.radius * std::sin(b.angle);
  return std::sqrt(dx * dx + dy * dy);
}

UserLayout draw_layout(const SystemConfig& cfg, StreamRng& rng) {
  UserLayout layout;
  auto draw = [&](int n, std::vector<PolarPosition>& out) {
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      PolarPosition p;
      p.radius = rng.uniform(cfg.reference_distance, cfg.max_distance);
      p.angle = rng.uniform(0.0, kTwoPi);
      out.push_back(p);
    }
  };
  draw(cfg.num_dl_users, layout.dl_positions);
  draw(cfg.num_ul_users, layout.ul_positions);
  return layout;
}

ChannelRealization generate(const UserLayout& layout, const SystemConfig& cfg,
                            std::uint64_t master_seed, std::uint64_t drop_index) {
  const int nt = cfg.num_antennas;
  const int k_users = static_cast<int>(layout.dl_positions.size());
  const int j_users = static_cast<int>(layout.ul_positions.size());

  ChannelRealization ch;
  ch.h.reserve(static_cast<std::size_t>(k_users));
  ch.g.reserve(static_cast<std::size_t>(j_users));

  StreamRng rng_dl(master_seed, drop_index, StreamKind::downlink);
  for (int k = 0; k < k_users; ++k) {
    const double gain =
        db_to_linear(-path_loss_db(layout.dl_positions[k].radius, cfg, true));
    ch.h.push_back(faded_vector(nt, gain, rng_dl));
  }

  StreamRng rng_ul(master_seed, drop_index, StreamKind::uplink);
  for (int j = 0; j < j_users; ++j) {
    const double gain =
        db_to_linear(-path_loss_db(layout.ul_positions[j].radius, cfg, true));
    ch.g.push_back(faded_vector(nt, gain, rng_ul));
  }

  // The paper does not give a user-user path-loss model; the BS model is
  // reused without antenna gain, clamped at the reference distance.
  StreamRng rng_f(master_seed, drop_index, StreamKind::inter_user);
  ch.f.resize(j_users, k_users);
  for (int j = 0; j < j_users; ++j) {
    for (int k = 0; k < k_users; ++k) {
      double d = user_distance(layout.ul_positions[j], layout.dl_positions[k]);
      d = std::max(d, cfg.reference_distance);
      const double gain = db_to_linear(-path_loss_db(d, cfg, false));
      ch.f(j, k) = std::sqrt(gain) * rng_f.complex_normal();
    }
  }

  // Unit-mean-square Rician entries: deterministic zero-phase LOS component
  // plus scattered CN(0, 1/(kappa+1)); scaled by the SI cancellation factor.
  StreamRng rng_si(master_seed, drop_index, StreamKind::self_interference);
  const double kappa = db_to_linear(cfg.rician_factor);
  const double los = std::sqrt(kappa / (kappa + 1.0));
  const double scatter = std::sqrt(1.0 / (kappa + 1.0));
  const double si_amp = std::sqrt(db_to_linear(cfg.si_cancellation));
  ch.h_si.resize(nt, nt);
  for (int r = 0; r < nt; ++r)
    for (int c = 0; c < nt; ++c)
      ch.h_si(r, c) = si_amp * (los + scatter * rng_si.complex_normal());

  ch.sigma2_dl = Eigen::VectorXd::Constant(k_users, cfg.noise_dl_watts());
  ch.sigma2_ul = cfg.noise_ul_watts();
  return ch;
}

ChannelRealization draw_realization(const SystemConfig& cfg,
                                    std::uint64_t master_seed,
                                    std::uint64_t drop_index) {
  StreamRng rng_layout(master_seed, drop_index, StreamKind::layout);
  const UserLayout layout = draw_layout(cfg, rng_layout);
  return generate(layout, cfg, master_seed, drop_index);
}

namespace {

void dump_matrix(std::ostream& os, const char* name, const Eigen::MatrixXcd& m) {
  os << name << " " << m.rows() << " " << m.cols() << "\n";
  os.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << " ";
      os << m(r, c).real() << "," << m(r, c).imag();
    }
    os << "\n";
  }
}

}  // namespace

void dump_realization(std::ostream& os, const ChannelRealization& ch) {
  const int nt = ch.nt();
  Eigen::MatrixXcd hmat(nt, ch.num_dl());
  for (int k = 0; k < ch.num_dl(); ++k) hmat.col(k) = ch.h[static_cast<std::size_t>(k)];
  Eigen::MatrixXcd gmat(nt, ch.num_ul());
  for (int j = 0; j < ch.num_ul(); ++j) gmat.col(j) = ch.g[static_cast<std::size_t>(j)];
  dump_matrix(os, "h", hmat);
  dump_matrix(os, "g", gmat);
  dump_matrix(os, "f", ch.f);
  dump_matrix(os, "h_si", ch.h_si);
  os << "sigma2_dl " << ch.sigma2_dl.size() << " 1\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < ch.sigma2_dl.size(); ++i)
    os << ch.sigma2_dl(i) << ",0\n";
  os << "sigma2_ul 1 1\n" << ch.sigma2_ul << ",0\n";
}

}  // namespace fdpa
