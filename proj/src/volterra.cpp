#include "fracvolt/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracvolt/numerics.hpp"
#include "fracvolt/special.hpp"

namespace fracvolt {

double mg_constant(double H) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("Hurst index must lie in (0,1)");
  return std::sqrt(2.0 * H * std::tgamma(1.5 - H) / (std::tgamma(H + 0.5) * std::tgamma(2.0 - 2.0 * H)));
}

double example_one_constant(double H) {
  if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("example-one kernel needs H in (1/2,1)");
  return std::sqrt(H * (2.0 * H - 1.0) / std::beta(2.0 - 2.0 * H, H - 0.5));
}

VolterraKernel VolterraKernel::molchan_golosov(double H) {
  VolterraKernel k(MolchanGolosov{H});
  k.C_ = mg_constant(H);
  return k;
}

VolterraKernel VolterraKernel::example_one(double H, std::function<double(double)> j, double bound_G,
                                           std::string j_name) {
  if (!j) throw std::invalid_argument("example-one kernel needs j");
  if (!(bound_G >= 0.0)) throw std::invalid_argument("bound of j must be nonnegative");
  VolterraKernel k(ExampleOneKernel{H, std::move(j), bound_G, std::move(j_name)});
  k.C_ = example_one_constant(H);
  return k;
}

VolterraKernel VolterraKernel::example_one_unit(double H) {
  VolterraKernel k = example_one(H, [](double) { return 1.0; }, 1.0, "one");
  std::get<ExampleOneKernel>(k.family_).unit_j = true;
  return k;
}

VolterraKernel VolterraKernel::custom(CustomKernel c) {
  if (!c.g) throw std::invalid_argument("custom kernel needs an evaluator");
  return VolterraKernel(std::move(c));
}

std::optional<double> VolterraKernel::hurst() const {
  if (const auto* m = std::get_if<MolchanGolosov>(&family_)) return m->H;
  if (const auto* e = std::get_if<ExampleOneKernel>(&family_)) return e->H;
  return std::nullopt;
}

bool VolterraKernel::is_unit() const {
  const auto* m = std::get_if<MolchanGolosov>(&family_);
  return m && m->H == 0.5;
}

bool VolterraKernel::is_homogeneous() const {
  if (std::holds_alternative<MolchanGolosov>(family_)) return true;
  const auto* e = std::get_if<ExampleOneKernel>(&family_);
  return e && e->unit_j;
}

double VolterraKernel::operator()(double t, double s) const {
  if (s >= t) return 0.0;
  if (const auto* m = std::get_if<MolchanGolosov>(&family_)) {
    const double H = m->H;
    if (H == 0.5) return 1.0;
    if (s <= 0.0) return H > 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
    return C_ * std::pow(t - s, H - 0.5) * hyp2f1(0.5 - H, H - 0.5, H + 0.5, (s - t) / s);
  }
  if (const auto* e = std::get_if<ExampleOneKernel>(&family_)) {
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    const double beta = e->H - 0.5;
    const double w = t - s;
    auto integrand = [&](double v) {
      const double u = s + w * std::pow(v, 1.0 / beta);
      return std::pow(u, beta) * e->j(u);
    };
    const double inner = std::pow(w, beta) / beta * gauss_composite(integrand, 0.0, 1.0, e->panels);
    return C_ * std::pow(s, -beta) * inner;
  }
  return std::get<CustomKernel>(family_).g(t, s);
}

std::string VolterraKernel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MolchanGolosov>) {
          os << "molchan_golosov(H=" << f.H << ")";
        } else if constexpr (std::is_same_v<T, ExampleOneKernel>) {
          os << "example_one(H=" << f.H << ",j=" << f.j_name << ",G=" << f.bound_G << ")";
        } else {
          os << "custom(" << f.name << ")";
        }
      },
      family_);
  return os.str();
}

namespace {

class HomogeneousTable {
 public:
  explicit HomogeneousTable(const VolterraKernel& k) : kernel_(k), H_(*k.hurst()) {
    const std::size_t n = static_cast<std::size_t>(std::ceil((kLogMax - kLogMin) / kStep)) + 4;
    left_.resize(n);
    right_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double q = std::exp(kLogMin + static_cast<double>(i) * kStep);
      left_[i] = reduced(q);
      right_[i] = reduced(1.0 - q);
    }
  }

  double operator()(double t, double s) const {
    if (s >= t) return 0.0;
    if (s <= 0.0) return kernel_(t, s);
    const double r = s / t;
    const double rc = (t - s) / t;
    const double q = r <= 0.5 ? r : rc;
    const double lq = std::log(q);
    if (lq < kLogMin + kStep) return kernel_(t, s);
    const double S = interpolate(r <= 0.5 ? left_ : right_, lq);
    return std::pow(t, H_ - 0.5) * std::pow(r, 0.5 - H_) * std::pow(rc, H_ - 0.5) * S;
  }

 private:
  static constexpr double kLogMin = -14.0 * 2.302585092994046;
  static constexpr double kLogMax = -0.6931471805599453;
  static constexpr double kStep = 2.302585092994046 / 128.0;

  double reduced(double r) const {
    return kernel_(1.0, r) / (std::pow(r, 0.5 - H_) * std::pow(1.0 - r, H_ - 0.5));
  }

  static double interpolate(const std::vector<double>& v, double x) {
    const double u = (x - kLogMin) / kStep;
    std::size_t i = static_cast<std::size_t>(std::floor(u));
    i = std::clamp<std::size_t>(i, 1, v.size() - 3);
    const double d = u - static_cast<double>(i);
    const double a = d + 1.0, b = d, c = d - 1.0, e = d - 2.0;
    return -v[i - 1] * b * c * e / 6.0 + v[i] * a * c * e / 2.0 - v[i + 1] * a * b * e / 2.0 +
           v[i + 2] * a * b * c / 6.0;
  }

  VolterraKernel kernel_;
  double H_;
  std::vector<double> left_, right_;
};

}  // namespace

std::function<double(double, double)> fast_evaluator(const VolterraKernel& k) {
  if (k.is_unit()) return [](double t, double s) { return s < t ? 1.0 : 0.0; };
  if (!k.is_homogeneous()) return [k](double t, double s) { return k(t, s); };
  auto table = std::make_shared<const HomogeneousTable>(k);
  return [table](double t, double s) { return (*table)(t, s); };
}

double eval_kernel(const VolterraKernel& k, double t, double s) {
  if (!(s >= 0.0) || !(s < t)) throw std::domain_error("kernel is evaluated on 0 <= s < t");
  return k(t, s);
}

KernelMatrix::KernelMatrix(const VolterraKernel& k, const Grid& grid, unsigned threads)
    : eval_(fast_evaluator(k)), grid_(grid) {
  grid_.validate();
  if (grid_.n > kMaxCachedSteps) return;
  rows_.resize(grid_.n + 1);
  parallel_for(grid_.n + 1, threads, [&](std::size_t i) {
    std::vector<double> r(i);
    for (std::size_t j = 0; j < i; ++j) r[j] = eval_(grid_.t(i), grid_.t0 + (static_cast<double>(j) + 0.5) * grid_.dt);
    rows_[i] = std::move(r);
  });
}

std::vector<double> KernelMatrix::row(std::size_t i) const {
  if (i > grid_.n) throw std::out_of_range("kernel row index beyond the grid");
  if (!rows_.empty()) return rows_[i];
  std::vector<double> r(i);
  for (std::size_t j = 0; j < i; ++j) r[j] = eval_(grid_.t(i), grid_.t0 + (static_cast<double>(j) + 0.5) * grid_.dt);
  return r;
}

GridPath KernelMatrix::apply(const GridPath& Z) const {
  Z.validate();
  if (Z.steps() != grid_.n || std::abs(Z.dt - grid_.dt) > 1e-12 * grid_.dt || std::abs(Z.t0 - grid_.t0) > 1e-12)
    throw std::invalid_argument("driver path does not match the kernel grid");
  std::vector<double> dZ(grid_.n);
  for (std::size_t j = 0; j < grid_.n; ++j) dZ[j] = Z.values[j + 1] - Z.values[j];
  std::vector<double> y(grid_.n + 1, 0.0);
  for (std::size_t i = 1; i <= grid_.n; ++i) {
    const std::vector<double>* r = nullptr;
    std::vector<double> tmp;
    if (!rows_.empty()) {
      r = &rows_[i];
    } else {
      tmp = row(i);
      r = &tmp;
    }
    NeumaierSum s;
    for (std::size_t j = 0; j < i; ++j) s += (*r)[j] * dZ[j];
    y[i] = s.value();
  }
  return GridPath(grid_, std::move(y), "Y", Z.seed);
}

VolterraPath build_path(const VolterraKernel& k, const GridPath& Z) {
  Z.validate();
  if (Z.t0 != 0.0) throw std::invalid_argument("Volterra paths start at t0 = 0");
  if (k.is_unit()) {
    std::vector<double> y(Z.values.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = Z.values[i] - Z.values[0];
    return {GridPath(Z.grid(), std::move(y), "Y", Z.seed), k.describe(), Z.label};
  }
  KernelMatrix m(k, Z.grid());
  return {m.apply(Z), k.describe(), Z.label};
}

IncrementDecomposition increment_decomposition(const VolterraKernel& k, const GridPath& Z, std::size_t s_idx,
                                               std::size_t t_idx) {
  Z.validate();
  if (!(s_idx < t_idx) || t_idx > Z.steps()) throw std::out_of_range("need s_idx < t_idx <= n");
  const double t = Z.t(t_idx), s = Z.t(s_idx);
  auto node = [&](std::size_t j) { return Z.t0 + (static_cast<double>(j) + 0.5) * Z.dt; };
  NeumaierSum boundary, history;
  for (std::size_t j = s_idx; j < t_idx; ++j) boundary += k(t, node(j)) * (Z.values[j + 1] - Z.values[j]);
  for (std::size_t j = 0; j < s_idx; ++j)
    history += (k(t, node(j)) - k(s, node(j))) * (Z.values[j + 1] - Z.values[j]);
  return {boundary.value(), history.value()};
}

std::vector<std::size_t> dyadic_lags(std::size_t steps, std::size_t count) {
  std::vector<std::size_t> lags;
  for (std::size_t m = 1; lags.size() < count && m <= steps / 8; m *= 2) lags.push_back(m);
  return lags;
}

HolderEstimate holder_exponent_estimate(std::span<const GridPath> paths, const std::vector<std::size_t>& lags) {
  if (paths.empty()) throw std::invalid_argument("Holder estimate needs at least one path");
  if (lags.size() < 4) throw std::invalid_argument("Holder estimate needs at least four lags");
  const std::size_t n = paths[0].steps();
  HolderEstimate out;
  for (std::size_t m : lags) {
    if (m == 0 || m >= n) throw std::invalid_argument("lag outside the grid");
    NeumaierSum s;
    std::size_t count = 0;
    for (const GridPath& p : paths) {
      if (p.steps() != n) throw std::invalid_argument("ensemble paths must share a grid");
      for (std::size_t i = 0; i + m <= n; ++i) {
        const double d = p.values[i + m] - p.values[i];
        s += d * d;
        ++count;
      }
    }
    out.lags.push_back(static_cast<double>(m) * paths[0].dt);
    out.variogram.push_back(s.value() / static_cast<double>(count));
  }
  const std::size_t k = lags.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += std::log(out.lags[i]);
    my += std::log(out.variogram[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = std::log(out.lags[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(out.variogram[i]) - my);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = std::log(out.variogram[i]) - my - slope * (std::log(out.lags[i]) - mx);
    rss += r * r;
  }
  out.exponent = 0.5 * slope;
  out.stderr_ = 0.5 * std::sqrt(rss / static_cast<double>(k - 2) / sxx);
  return out;
}

VolterraEnsemble build_ensemble(const VolterraKernel& k, const LevyTriplet& driver, const Grid& grid,
                                std::size_t paths, std::uint64_t master, unsigned threads) {
  if (grid.t0 != 0.0) throw std::invalid_argument("Volterra paths start at t0 = 0");
  VolterraEnsemble e;
  e.grid = grid;
  e.master = master;
  e.kernel_meta = k.describe();
  e.driver_meta = driver.describe();
  const auto sampler = make_driver_sampler(driver, grid);
  const KernelMatrix m(k, grid, threads);
  const SeedSequence seq(master);
  e.paths.resize(paths);
  e.seeds.resize(paths);
  parallel_for(paths, threads, [&](std::size_t i) {
    e.seeds[i] = seq.seed(i);
    const GridPath z = sampler(e.seeds[i]);
    GridPath y = k.is_unit() ? z : m.apply(z);
    y.label = "Y";
    e.paths[i] = {std::move(y), e.kernel_meta, e.driver_meta};
  });
  return e;
}

std::string VolterraEnsemble::sidecar_json() const {
  nlohmann::json j;
  j["driver"] = driver_meta;
  j["grid"] = {{"dt", grid.dt}, {"n", grid.n}, {"t0", grid.t0}};
  j["kernel"] = kernel_meta;
  j["master_seed"] = master;
  j["paths"] = paths.size();
  j["seeds"] = seeds;
  return j.dump(2);
}

}  // namespace fracvolt
