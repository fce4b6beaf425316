#include "qlbm/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qlbm/channels.hpp"

namespace qlbm {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("read_field_csv: " + what);
}

}  // namespace

void write_field_csv(std::ostream& os, const DistributionField& f) {
  os << "x,y,i,f\n";
  for (int x = 0; x < f.grid.lx(); ++x) {
    for (int y = 0; y < f.grid.ly(); ++y) {
      for (int i = 0; i < ChannelSet::kCount; ++i) {
        os << x << ',' << y << ',' << i << ',' << format_double(f.at(x, y, i))
           << '\n';
      }
    }
  }
}

void write_field_csv(const std::string& path, const DistributionField& f) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("write_field_csv: cannot open " + path);
  }
  write_field_csv(os, f);
}

DistributionField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,y,i,f") {
    malformed("missing \"x,y,i,f\" header");
  }

  struct Row {
    int x, y, i;
    double f;
  };
  std::vector<Row> rows;
  int max_x = -1;
  int max_y = -1;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ss(line);
    Row r;
    char c1, c2, c3;
    if (!(ss >> r.x >> c1 >> r.y >> c2 >> r.i >> c3 >> r.f) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      malformed("bad row \"" + line + "\"");
    }
    if (r.x < 0 || r.y < 0 || r.i < 0 || r.i >= ChannelSet::kCount) {
      malformed("out-of-range indices in \"" + line + "\"");
    }
    max_x = std::max(max_x, r.x);
    max_y = std::max(max_y, r.y);
    rows.push_back(r);
  }
  if (rows.empty()) {
    malformed("no data rows");
  }

  LatticeGrid grid(max_x + 1, max_y + 1);
  DistributionField f(grid);
  std::vector<char> seen(static_cast<size_t>(grid.sites()) * 9, 0);
  for (const Row& r : rows) {
    const size_t cell = static_cast<size_t>(grid.index(r.x, r.y)) * 9 + r.i;
    if (seen[cell]) {
      malformed("duplicate cell in input");
    }
    seen[cell] = 1;
    f.at(r.x, r.y, r.i) = r.f;
  }
  for (char s : seen) {
    if (!s) {
      malformed("missing cells: input does not cover the full grid");
    }
  }
  return f;
}

DistributionField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("read_field_csv: cannot open " + path);
  }
  return read_field_csv(is);
}

}  // namespace qlbm
