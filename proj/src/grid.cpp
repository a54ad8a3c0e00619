#include "fracvolt/grid.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fracvolt {

void Grid::validate() const {
  if (!(dt > 0.0) || n < 1) throw std::invalid_argument("grid needs dt > 0 and n >= 1");
}

Grid Grid::over(double t0, double t1, std::size_t n) {
  Grid g{t0, (t1 - t0) / static_cast<double>(n), n};
  g.validate();
  return g;
}

GridPath::GridPath(const Grid& g, std::vector<double> v, std::string lbl, std::uint64_t sd)
    : t0(g.t0), dt(g.dt), values(std::move(v)), label(std::move(lbl)), seed(sd) {
  validate();
}

void GridPath::validate() const {
  if (values.size() < 2 || !(dt > 0.0)) throw std::invalid_argument("grid path needs >= 2 values and dt > 0");
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_path_csv(std::ostream& os, const GridPath& p) {
  os << "t,value\n";
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    os << format_double(p.t(i)) << ',' << format_double(p.values[i]) << '\n';
  }
}

GridPath read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty path file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value") throw std::invalid_argument("path file must start with header t,value");
  std::vector<double> ts, vs;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed path row: " + line);
    double t = 0, v = 0;
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + comma, t);
    auto r2 = std::from_chars(b + comma + 1, b + line.size(), v);
    if (r1.ec != std::errc() || r2.ec != std::errc()) throw std::invalid_argument("malformed path row: " + line);
    ts.push_back(t);
    vs.push_back(v);
  }
  if (ts.size() < 2) throw std::invalid_argument("path file needs at least two rows");
  const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (std::abs((ts[i] - ts[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw std::invalid_argument("path file grid is not uniform");
    }
  }
  return GridPath(Grid{ts.front(), dt, ts.size() - 1}, std::move(vs));
}

void write_path_binary(std::ostream& os, const GridPath& p) {
  for (double v : p.values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char raw[8];
    std::memcpy(raw, &bits, 8);
    os.write(raw, 8);
  }
}

std::vector<double> read_values_binary(std::istream& is) {
  std::vector<double> out;
  char raw[8];
  while (is.read(raw, 8)) {
    std::uint64_t bits;
    std::memcpy(&bits, raw, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out.push_back(std::bit_cast<double>(bits));
  }
  return out;
}

void write_ensemble_csv(std::ostream& os, std::span<const GridPath> paths) {
  if (paths.empty()) return;
  os << "path";
  for (std::size_t i = 0; i < paths[0].values.size(); ++i) os << ',' << format_double(paths[0].t(i));
  os << '\n';
  for (std::size_t k = 0; k < paths.size(); ++k) {
    os << k;
    for (double v : paths[k].values) os << ',' << format_double(v);
    os << '\n';
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SeedSequence::seed(std::uint64_t index, std::uint64_t stream) const noexcept {
  return splitmix64(splitmix64(splitmix64(master_) ^ index) + 0x632be59bd9b4e019ULL * (stream + 1));
}

}  // namespace fracvolt
