#include "qlbm/compare.hpp"

#include <cmath>
#include <stdexcept>

namespace qlbm {

namespace {

struct Accumulator {
  ErrorStats stats;
  double diff_sq = 0.0;
  double ref_sq = 0.0;

  void add(double a, double b, double floor) {
    const double abs_err = std::abs(a - b);
    stats.max_abs = std::max(stats.max_abs, abs_err);
    diff_sq += (a - b) * (a - b);
    ref_sq += b * b;
    if (std::abs(b) > floor) {
      stats.max_rel = std::max(stats.max_rel, abs_err / std::abs(b));
      ++stats.relative_entries;
    } else {
      stats.max_abs_below_floor = std::max(stats.max_abs_below_floor, abs_err);
      ++stats.absolute_entries;
    }
  }

  ErrorStats finish() {
    stats.rel_l2 = ref_sq > 0.0 ? std::sqrt(diff_sq / ref_sq) : 0.0;
    return stats;
  }
};

}  // namespace

ErrorStats compare_values(const std::vector<double>& a,
                          const std::vector<double>& b, double floor) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("compare_values: length mismatch");
  }
  Accumulator acc;
  for (size_t k = 0; k < a.size(); ++k) {
    acc.add(a[k], b[k], floor);
  }
  return acc.finish();
}

FieldComparison compare_fields(const DistributionField& a,
                               const DistributionField& b, double floor) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("compare_fields: grid shape mismatch");
  }
  FieldComparison out;
  Accumulator overall;
  std::array<Accumulator, 9> channel;
  out.site_max_rel.assign(a.grid.sites(), 0.0);
  for (int s = 0; s < a.grid.sites(); ++s) {
    for (int i = 0; i < 9; ++i) {
      const double av = a.at(s, i);
      const double bv = b.at(s, i);
      overall.add(av, bv, floor);
      channel[i].add(av, bv, floor);
      if (std::abs(bv) > floor) {
        out.site_max_rel[s] =
            std::max(out.site_max_rel[s], std::abs(av - bv) / std::abs(bv));
      }
    }
  }
  out.overall = overall.finish();
  for (int i = 0; i < 9; ++i) {
    out.per_channel[i] = channel[i].finish();
  }
  return out;
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("relative_l2: length mismatch");
  }
  double diff_sq = 0.0;
  double ref_sq = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    diff_sq += (a[k] - b[k]) * (a[k] - b[k]);
    ref_sq += b[k] * b[k];
  }
  return ref_sq > 0.0 ? std::sqrt(diff_sq / ref_sq) : 0.0;
}

}  // namespace qlbm
