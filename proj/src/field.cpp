#include "qlbm/field.hpp"

namespace qlbm {

double DistributionField::total_mass() const {
  double m = 0.0;
  for (double v : values) m += v;
  return m;
}

}  // namespace qlbm
