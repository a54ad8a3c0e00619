#pragma once

#include <string>
#include <vector>

#include "fracvolt/grid.hpp"

namespace fracvolt {

enum class Side { Left, Right };

struct FracOrder {
  double alpha = 0.5;
  Side side = Side::Left;
  void validate() const;
};

/// I^alpha_{a+} or I^alpha_{b-} on the grid nodes; exact for the piecewise-linear
/// interpolant of f. The node at the base point carries 0.
GridPath frac_integral(const GridPath& f, FracOrder ord);

/// Weyl form of D^alpha_{a+} (nodes a+h..b) or D^alpha_{b-} (nodes a..b-h) of the
/// piecewise-linear interpolant; the base node is excluded from the output.
GridPath frac_derivative(const GridPath& f, FracOrder ord);

/// frac_derivative with the leading h^(2-alpha) error removed by one Richardson step
/// against the 2h subgrid; output on the 2h nodes. Needs an even step count.
GridPath frac_derivative_extrapolated(const GridPath& f, FracOrder ord);

enum class BoundaryMode { FAPlus, GBMinus };
/// f_{a+} = f - f(a+) or g_{b-} = g(b-) - g, zero at both end nodes.
GridPath boundary_adjusted(const GridPath& f, BoundaryMode mode);

struct FactorNorms {
  double l1 = 0.0;
  double sup = 0.0;
};

struct GlsResult {
  double value = 0.0;
  double alpha = 0.5;
  double boundary_term = 0.0;
  bool recentered = true;
  FactorNorms f_factor;
  FactorNorms g_factor;
  std::string to_json() const;
};

struct GlsOptions {
  /// Use D^alpha_{a+} f instead of D^alpha_{a+} f_{a+}; the boundary term is then
  /// already contained in the integral and only reported.
  bool drop_recentering = false;
};

/// int D^alpha_{a+} f_{a+} D^{1-alpha}_{b-} g_{b-} dx + f(a+)(g(b-) - g(a+)).
GlsResult gls_integral(const GridPath& f, const GridPath& g, double alpha, const GlsOptions& opt = {});

enum class PartitionMode { Left, Midpoint };
/// sum f(x_i*) (g(x_{i+1}) - g(x_i)); the midpoint value is the linear interpolant.
double rs_integral(const GridPath& f, const GridPath& g, PartitionMode mode = PartitionMode::Left);

enum class ConnectedMode {
  L1Sup,  // int |D^alpha X| < inf, sup |D^{1-alpha} Y_{t-}| < inf
  SupL1,  // sup |D^alpha X| < inf, int |D^{1-alpha} Y_{t-}| < inf
  LqLp    // int |D^alpha X|^q < inf, int |D^{1-alpha} Y_{t-}|^p < inf, 1/p + 1/q = 1
};

struct ConnectedLevel {
  std::size_t steps = 0;
  double x_quantity = 0.0;
  double y_quantity = 0.0;
};

struct ConnectedReport {
  bool verdict = false;
  bool x_finite = false;
  bool y_finite = false;
  std::vector<ConnectedLevel> evidence;
};

/// Evaluates the required norms of D^alpha_{0+} X and D^{1-alpha}_{t-} Y_{t-} on [0, t]
/// at the grid and at 2, 4, 8 times coarser subsamples; a factor is divergent when
/// its quantity keeps growing under refinement.
ConnectedReport alpha_connected_check(const GridPath& x, const GridPath& y, double t, double alpha,
                                      ConnectedMode mode, double p = 2.0);

}  // namespace fracvolt
