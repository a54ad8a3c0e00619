#pragma once

namespace fracvolt {

/// 1/Gamma(x), zero at the poles of Gamma.
double rgamma(double x);

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.
///
/// The power series is used for |z| <= 1/2. Negative arguments below -1/2 go
/// through the Pfaff transformation to w = z/(z-1); arguments (or w) close to
/// 1 use the connection formula at 1 - w. Series terms are summed until they
/// drop below `tol` relative to the partial sum.
double hyp2f1(double a, double b, double c, double z, double tol = 1e-10);

}  // namespace fracvolt
