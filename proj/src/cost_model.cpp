#include "qlbm/cost_model.hpp"

#include <fstream>
#include <stdexcept>

#include "qlbm/channels.hpp"

namespace qlbm {

CostModel::CostModel(const LatticeGrid& grid)
    : site_bits_(grid.site_bits()), sites_(grid.sites()) {}

int CostModel::propagation_shift_count() {
  const ChannelSet& ch = d2q9();
  int count = 0;
  for (int i = 0; i < ChannelSet::kCount; ++i) {
    if (ch.velocity[i].x != 0) ++count;
    if (ch.velocity[i].y != 0) ++count;
  }
  for (int i = 0; i < ChannelSet::kCount; ++i) {
    for (int j = 0; j < ChannelSet::kCount; ++j) {
      const Vec2i d = ch.velocity[j] - ch.velocity[i];
      if (d.x != 0) ++count;
      if (d.y != 0) ++count;
    }
  }
  return count;
}

void write_cost_csv(std::ostream& os, const std::vector<CostEntry>& entries) {
  os << "step,component,gate_count_model\n";
  for (const CostEntry& e : entries) {
    os << e.step << ',' << e.component << ',' << e.count << '\n';
  }
}

void write_cost_csv(const std::string& path,
                    const std::vector<CostEntry>& entries) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("write_cost_csv: cannot open " + path);
  }
  write_cost_csv(os, entries);
}

}  // namespace qlbm
