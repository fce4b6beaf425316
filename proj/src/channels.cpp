#include "qlbm/channels.hpp"

namespace qlbm {

const ChannelSet& d2q9() {
  static const ChannelSet set{
      /*velocity=*/{{{0, 0},
                     {1, 0},
                     {0, 1},
                     {-1, 0},
                     {0, -1},
                     {1, 1},
                     {-1, 1},
                     {-1, -1},
                     {1, -1}}},
      /*weight=*/{4.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0,
                  1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0},
  };
  return set;
}

int ChannelSet::opposite(int i) const {
  const Vec2i r = -velocity[i];
  for (int j = 0; j < kCount; ++j) {
    if (velocity[j] == r) return j;
  }
  return -1;  // unreachable for D2Q9
}

}  // namespace qlbm
