#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fracvolt {

/// Uniform time grid t_i = t0 + i*dt, i = 0..n.
struct Grid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n = 1;

  double t(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
  double t_end() const noexcept { return t(n); }
  /// Throws std::invalid_argument unless dt > 0 and n >= 1.
  void validate() const;
  static Grid over(double t0, double t1, std::size_t n);
};

/// A process or function sampled on a uniform grid.
struct GridPath {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;
  std::string label;
  std::uint64_t seed = 0;

  GridPath() = default;
  GridPath(const Grid& g, std::vector<double> v, std::string label = {}, std::uint64_t seed = 0);

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double t(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
  double t_end() const noexcept { return t(steps()); }
  Grid grid() const noexcept { return {t0, dt, steps()}; }
  void validate() const;
};

/// Samples f at the grid nodes.
template <class F>
GridPath sample_function(F&& f, const Grid& g, std::string label = {}) {
  std::vector<double> v(g.n + 1);
  for (std::size_t i = 0; i <= g.n; ++i) v[i] = f(g.t(i));
  return GridPath(g, std::move(v), std::move(label));
}

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

/// CSV with header "t,value", LF line endings.
void write_path_csv(std::ostream& os, const GridPath& p);
GridPath read_path_csv(std::istream& is);
/// Little-endian float64 values, for exact round trips independent of text.
void write_path_binary(std::ostream& os, const GridPath& p);
std::vector<double> read_values_binary(std::istream& is);

/// Ensemble matrix: header "path,t0,...,tn", one row per path.
void write_ensemble_csv(std::ostream& os, std::span<const GridPath> paths);

/// Per-path random substreams derived from one master seed.
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t master) : master_(master) {}
  /// Seed for path `index` and stream `stream` (e.g. subordinator vs Wiener).
  std::uint64_t seed(std::uint64_t index, std::uint64_t stream = 0) const noexcept;
  std::mt19937_64 engine(std::uint64_t index, std::uint64_t stream = 0) const {
    return std::mt19937_64(seed(index, stream));
  }
  std::uint64_t master() const noexcept { return master_; }

 private:
  std::uint64_t master_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace fracvolt
