#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace srp {

std::vector<double> default_lambda_grid();  // 10^-3 .. 10^3, 11 points

struct GamFit {
  int n_splines = 5;
  std::vector<double> knots;
  Eigen::VectorXd coef;
  double lambda = 0.0;
  double gcv = 0.0;
  double edf = 0.0;
  double sigma2 = 0.0;
  double pseudo_r2 = 0.0;
  double x_min = 0.0, x_max = 0.0;
  Eigen::MatrixXd cov;  // sigma2 * (B'B + lambda P)^-1

  double predict(double x) const;
  // Pointwise standard error of the fitted curve.
  double se(double x) const;
};

// Cubic B-spline basis on uniform knots over [lo, hi], `n` functions.
std::vector<double> uniform_knots(double lo, double hi, int n_splines);
Eigen::RowVectorXd bspline_row(double x, const std::vector<double>& knots, int n_splines);

// Penalised regression spline of y on x; the second-difference penalty
// weight is picked from `lambdas` by generalised cross-validation.
// Throws std::invalid_argument for n < 50, unequal lengths, non-finite
// values or a degenerate x range.
GamFit fit_gam(std::span<const double> x, std::span<const double> y, int n_splines = 5,
               const std::vector<double>& lambdas = default_lambda_grid());

// Same with a fixed penalty weight.
GamFit fit_gam_fixed(std::span<const double> x, std::span<const double> y, int n_splines,
                     double lambda);

struct CurvePoint {
  double x, yhat, lo, hi;
};

std::vector<CurvePoint> gam_curve(const GamFit& fit, int points = 100);

}  // namespace srp
