// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "fdpa/channel.hpp"
#include "fdpa/config.hpp"
#include "fdpa/sdp_builder.hpp"
#include "fdpa/zf.hpp"

namespace fdpa::test {

inline SystemConfig table1_config(int nt = 10, int k = 3, int j = 8) {
  SystemConfig cfg;
  cfg.num_antennas = nt;
  cfg.num_dl_users = k;
  cfg.num_ul_users = j;
  return cfg;
}

struct Instance {
  ChannelRealization ch;
  ReceiveBank bank;
  Targets targets;
};

inline Instance make_instance(std::uint64_t seed, std::uint64_t drop,
                              int nt = 10, int k = 3, int j = 8) {
  const SystemConfig cfg = table1_config(nt, k, j);
  Instance inst;
  inst.ch = draw_realization(cfg, seed, drop);
  inst.bank = build_zf(inst.ch.g);
  inst.targets = Targets::from_config(cfg);
  return inst;
}

}  // namespace fdpa::test
