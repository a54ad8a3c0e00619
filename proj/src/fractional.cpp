#include "fracvolt/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "fracvolt/errors.hpp"
#include "fracvolt/numerics.hpp"

namespace fracvolt {
namespace {

// Product-integration rule for I^alpha_{a+} of the piecewise-linear interpolant.
std::vector<double> left_integral(const std::vector<double>& f, double h, double alpha) {
  const std::size_t n = f.size() - 1;
  std::vector<double> pw(n + 2);
  for (std::size_t m = 0; m < pw.size(); ++m) pw[m] = std::pow(static_cast<double>(m), alpha + 1.0);
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) d[m] = pw[m + 1] - 2.0 * pw[m] + pw[m - 1];
  const double scale = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    NeumaierSum s;
    s += (pw[k - 1] - (kd - 1.0 - alpha) * std::pow(kd, alpha)) * f[0];
    for (std::size_t j = 1; j < k; ++j) s += d[k - j] * f[j];
    s += f[k];
    out[k] = scale * s.value();
  }
  return out;
}

// Weyl form of D^alpha_{a+} of the piecewise-linear interpolant. Panel m (gap u in
// [mh, (m+1)h]) contributes (f_k - f_{k-m}) M0(m) + (f_{k-m-1} - f_{k-m}) c(m), where
// M0 = int u^{-alpha-1} du and c = m M0 - int u^{-alpha} du / h.
std::vector<double> left_derivative(const std::vector<double>& f, double h, double alpha) {
  const std::size_t n = f.size() - 1;
  std::vector<double> m0(n + 1, 0.0), c(n + 1, 0.0);
  const double ha = std::pow(h, -alpha);
  c[0] = -ha / (1.0 - alpha);
  for (std::size_t m = 1; m <= n; ++m) {
    const double md = static_cast<double>(m);
    m0[m] = ha * (std::pow(md, -alpha) - std::pow(md + 1.0, -alpha)) / alpha;
    const double m1 = ha * (std::pow(md + 1.0, 1.0 - alpha) - std::pow(md, 1.0 - alpha)) / (1.0 - alpha);
    c[m] = md * m0[m] - m1;
  }
  const double norm = 1.0 / std::tgamma(1.0 - alpha);
  std::vector<double> out(n + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k <= n; ++k) {
    NeumaierSum s;
    for (std::size_t m = 0; m < k; ++m) {
      if (m > 0) s += (f[k] - f[k - m]) * m0[m];
      s += (f[k - m - 1] - f[k - m]) * c[m];
    }
    out[k] = norm * (f[k] * std::pow(static_cast<double>(k) * h, -alpha) + alpha * s.value());
  }
  return out;
}

std::vector<double> reversed(std::vector<double> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fractional order must lie in (0,1)");
}

void check_same_grid(const GridPath& f, const GridPath& g) {
  if (f.values.size() != g.values.size() || std::abs(f.dt - g.dt) > 1e-12 * f.dt ||
      std::abs(f.t0 - g.t0) > 1e-12 * std::max(1.0, std::abs(f.t0)))
    throw std::invalid_argument("grid functions must share a grid");
}

// Derivative values at all nodes; the excluded base node holds NaN.
std::vector<double> derivative_nodes(const std::vector<double>& v, double h, double alpha, Side side) {
  if (side == Side::Left) return left_derivative(v, h, alpha);
  return reversed(left_derivative(reversed(v), h, alpha));
}

FactorNorms norms_interior(const std::vector<double>& d, double h) {
  FactorNorms n;
  NeumaierSum l1;
  for (std::size_t k = 1; k + 1 < d.size(); ++k) {
    l1 += std::abs(d[k]) * h;
    n.sup = std::max(n.sup, std::abs(d[k]));
  }
  n.l1 = l1.value();
  return n;
}

}  // namespace

void FracOrder::validate() const { check_alpha(alpha); }

GridPath frac_integral(const GridPath& f, FracOrder ord) {
  ord.validate();
  f.validate();
  std::vector<double> out = ord.side == Side::Left ? left_integral(f.values, f.dt, ord.alpha)
                                                   : reversed(left_integral(reversed(f.values), f.dt, ord.alpha));
  return GridPath(f.grid(), std::move(out), "I^alpha", f.seed);
}

GridPath frac_derivative(const GridPath& f, FracOrder ord) {
  ord.validate();
  f.validate();
  if (f.steps() < 2) throw std::invalid_argument("fractional derivative needs at least two steps");
  std::vector<double> d = derivative_nodes(f.values, f.dt, ord.alpha, ord.side);
  const Grid g = f.grid();
  if (ord.side == Side::Left) {
    d.erase(d.begin());
    return GridPath(Grid{g.t0 + g.dt, g.dt, g.n - 1}, std::move(d), "D^alpha", f.seed);
  }
  d.pop_back();
  return GridPath(Grid{g.t0, g.dt, g.n - 1}, std::move(d), "D^alpha", f.seed);
}

GridPath frac_derivative_extrapolated(const GridPath& f, FracOrder ord) {
  ord.validate();
  f.validate();
  if (f.steps() < 4 || f.steps() % 2 != 0) throw std::invalid_argument("extrapolated derivative needs an even step count >= 4");
  std::vector<double> half(f.steps() / 2 + 1);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = f.values[2 * i];
  const GridPath coarse(Grid{f.t0, 2.0 * f.dt, half.size() - 1}, std::move(half), f.label, f.seed);
  const GridPath fine_d = frac_derivative(f, ord);
  GridPath d = frac_derivative(coarse, ord);
  const double w = std::pow(2.0, 2.0 - ord.alpha);
  for (std::size_t j = 0; j < d.values.size(); ++j) {
    const auto i = static_cast<std::size_t>(std::llround((d.t(j) - fine_d.t0) / f.dt));
    d.values[j] = (w * fine_d.values[i] - d.values[j]) / (w - 1.0);
  }
  return d;
}

GridPath boundary_adjusted(const GridPath& f, BoundaryMode mode) {
  f.validate();
  std::vector<double> v(f.values.size(), 0.0);
  const double fa = f.values.front(), gb = f.values.back();
  for (std::size_t k = 1; k + 1 < v.size(); ++k) v[k] = mode == BoundaryMode::FAPlus ? f.values[k] - fa : gb - f.values[k];
  // The end nodes carry the one-sided limits: f_{a+}(b-) and g_{b-}(a+).
  if (mode == BoundaryMode::FAPlus) v.back() = f.values.back() - fa;
  else v.front() = gb - f.values.front();
  return GridPath(f.grid(), std::move(v), f.label, f.seed);
}

GlsResult gls_integral(const GridPath& f, const GridPath& g, double alpha, const GlsOptions& opt) {
  check_alpha(alpha);
  f.validate();
  g.validate();
  check_same_grid(f, g);
  if (f.steps() < 2) throw std::invalid_argument("GLS integral needs at least two steps");
  const double h = f.dt;
  const double fa = f.values.front();
  std::vector<double> fv = f.values;
  if (!opt.drop_recentering)
    for (double& x : fv) x -= fa;
  std::vector<double> gv(g.values.size());
  for (std::size_t k = 0; k < gv.size(); ++k) gv[k] = g.values.back() - g.values[k];

  const std::vector<double> df = left_derivative(fv, h, alpha);
  const std::vector<double> dg = reversed(left_derivative(reversed(gv), h, 1.0 - alpha));

  GlsResult r;
  r.alpha = alpha;
  r.recentered = !opt.drop_recentering;
  r.boundary_term = fa * (g.values.back() - g.values.front());
  r.f_factor = norms_interior(df, h);
  r.g_factor = norms_interior(dg, h);
  for (std::size_t k = 1; k + 1 < df.size(); ++k) {
    if (!std::isfinite(df[k]))
      throw DivergentDerivativeError("D^alpha_{a+} f", r.f_factor.l1, "fractional derivative of f is not finite");
    if (!std::isfinite(dg[k]))
      throw DivergentDerivativeError("D^{1-alpha}_{b-} g", r.g_factor.l1, "fractional derivative of g is not finite");
  }
  NeumaierSum s;
  for (std::size_t k = 1; k + 1 < df.size(); ++k) s += df[k] * dg[k] * h;
  r.value = s.value() + (opt.drop_recentering ? 0.0 : r.boundary_term);
  return r;
}

std::string GlsResult::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["boundary_term"] = boundary_term;
  j["factor_norms"] = {{"f", {{"l1", f_factor.l1}, {"sup", f_factor.sup}}},
                       {"g", {{"l1", g_factor.l1}, {"sup", g_factor.sup}}}};
  j["recentered"] = recentered;
  j["value"] = value;
  return j.dump(2);
}

double rs_integral(const GridPath& f, const GridPath& g, PartitionMode mode) {
  f.validate();
  g.validate();
  check_same_grid(f, g);
  NeumaierSum s;
  for (std::size_t i = 0; i + 1 < f.values.size(); ++i) {
    const double fx = mode == PartitionMode::Left ? f.values[i] : 0.5 * (f.values[i] + f.values[i + 1]);
    s += fx * (g.values[i + 1] - g.values[i]);
  }
  return s.value();
}

ConnectedReport alpha_connected_check(const GridPath& x, const GridPath& y, double t, double alpha,
                                      ConnectedMode mode, double p) {
  check_alpha(alpha);
  x.validate();
  y.validate();
  check_same_grid(x, y);
  if (mode == ConnectedMode::LqLp && !(p > 1.0)) throw std::invalid_argument("conjugate exponents need p > 1");
  const double q = mode == ConnectedMode::LqLp ? p / (p - 1.0) : 1.0;
  const auto N = static_cast<std::size_t>(std::floor((t - x.t0) / x.dt + 1e-9));
  if (N > x.steps()) throw std::invalid_argument("t lies beyond the path");
  std::size_t levels = 1;
  while (levels < 4 && N % (std::size_t{1} << levels) == 0 && (N >> levels) >= 8) ++levels;
  if (levels < 3) throw std::invalid_argument("alpha-connectedness check needs at least 32 steps on [0,t]");

  auto lp = [](const std::vector<double>& d, double h, double e, bool sup) {
    NeumaierSum s;
    double m = 0.0;
    for (std::size_t k = 1; k + 1 < d.size(); ++k) {
      if (sup) m = std::max(m, std::abs(d[k]));
      else s += std::pow(std::abs(d[k]), e) * h;
    }
    return sup ? m : s.value();
  };

  ConnectedReport rep;
  for (std::size_t l = levels; l-- > 0;) {
    const std::size_t r = std::size_t{1} << l;
    std::vector<double> xv, yv;
    for (std::size_t k = 0; k <= N; k += r) {
      xv.push_back(x.values[k]);
      yv.push_back(y.values[N] - y.values[k]);
    }
    const double h = x.dt * static_cast<double>(r);
    const std::vector<double> dx = left_derivative(xv, h, alpha);
    const std::vector<double> dy = reversed(left_derivative(reversed(yv), h, 1.0 - alpha));
    ConnectedLevel lev;
    lev.steps = N / r;
    switch (mode) {
      case ConnectedMode::L1Sup:
        lev.x_quantity = lp(dx, h, 1.0, false);
        lev.y_quantity = lp(dy, h, 1.0, true);
        break;
      case ConnectedMode::SupL1:
        lev.x_quantity = lp(dx, h, 1.0, true);
        lev.y_quantity = lp(dy, h, 1.0, false);
        break;
      case ConnectedMode::LqLp:
        lev.x_quantity = lp(dx, h, q, false);
        lev.y_quantity = lp(dy, h, p, false);
        break;
    }
    rep.evidence.push_back(lev);
  }

  auto finite = [&](auto get) {
    std::vector<double> v;
    for (const auto& e : rep.evidence) v.push_back(get(e));
    for (double a : v)
      if (!std::isfinite(a)) return false;
    const std::size_t k = v.size();
    const bool ratio_growth = v[k - 2] > 1.5 * v[k - 3] && v[k - 1] > 1.5 * v[k - 2];
    bool increment_growth = false;
    if (k >= 4) {
      const double d0 = v[k - 3] - v[k - 4], d1 = v[k - 2] - v[k - 3], d2 = v[k - 1] - v[k - 2];
      increment_growth = d0 > 0.0 && d1 >= 0.9 * d0 && d2 >= 0.9 * d1 && d2 > 1e-3 * std::abs(v[k - 1]);
    }
    return !(ratio_growth || increment_growth);
  };
  rep.x_finite = finite([](const ConnectedLevel& e) { return e.x_quantity; });
  rep.y_finite = finite([](const ConnectedLevel& e) { return e.y_quantity; });
  rep.verdict = rep.x_finite && rep.y_finite;
  return rep;
}

}  // namespace fracvolt
