#include "srpkit/gam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace srp {

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(std::pow(10.0, -3.0 + 0.6 * i));
  return g;
}

std::vector<double> uniform_knots(double lo, double hi, int n_splines) {
  constexpr int degree = 3;
  const int intervals = n_splines - degree;
  if (intervals < 1) throw std::invalid_argument("cubic splines need at least 4 basis functions");
  const double h = (hi - lo) / intervals;
  std::vector<double> k;
  for (int i = -degree; i <= intervals + degree; ++i) k.push_back(lo + i * h);
  return k;
}

Eigen::RowVectorXd bspline_row(double x, const std::vector<double>& knots, int n_splines) {
  constexpr int degree = 3;
  const int m = static_cast<int>(knots.size());
  // Keep the right end inside the last interval of the data range.
  const double hi = knots[static_cast<std::size_t>(m - degree - 1)];
  const double lo = knots[degree];
  x = std::clamp(x, lo, std::nextafter(hi, lo));
  std::vector<double> b(static_cast<std::size_t>(m - 1), 0.0);
  for (int i = 0; i < m - 1; ++i)
    if (knots[i] <= x && x < knots[i + 1]) b[i] = 1.0;
  for (int d = 1; d <= degree; ++d) {
    for (int i = 0; i < m - 1 - d; ++i) {
      double left = 0.0, right = 0.0;
      double dl = knots[i + d] - knots[i];
      double dr = knots[i + d + 1] - knots[i + 1];
      if (dl > 0) left = (x - knots[i]) / dl * b[i];
      if (dr > 0) right = (knots[i + d + 1] - x) / dr * b[i + 1];
      b[i] = left + right;
    }
  }
  Eigen::RowVectorXd row(n_splines);
  for (int i = 0; i < n_splines; ++i) row(i) = b[i];
  return row;
}

double GamFit::predict(double x) const { return bspline_row(x, knots, n_splines).dot(coef); }

double GamFit::se(double x) const {
  Eigen::RowVectorXd b = bspline_row(x, knots, n_splines);
  return std::sqrt(std::max(0.0, (b * cov * b.transpose())(0, 0)));
}

namespace {

struct Design {
  Eigen::MatrixXd B;
  Eigen::VectorXd y;
  Eigen::MatrixXd D;  // second differences
  std::vector<double> knots;
  double lo, hi;
};

Design design(std::span<const double> x, std::span<const double> y, int n_splines) {
  if (x.size() != y.size())
    throw std::invalid_argument("x and y differ in length: " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  if (x.size() < 50) throw std::invalid_argument("GAM needs at least 50 observations");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("non-finite value at observation " + std::to_string(i));
  Design d;
  auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  d.lo = *mn;
  d.hi = *mx;
  if (!(d.hi - d.lo > 1e-12 * std::max(1.0, std::fabs(d.lo))))
    throw std::invalid_argument("degenerate x range");
  d.knots = uniform_knots(d.lo, d.hi, n_splines);
  const auto n = static_cast<Eigen::Index>(x.size());
  d.B.resize(n, n_splines);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.B.row(i) = bspline_row(x[static_cast<std::size_t>(i)], d.knots, n_splines);
    d.y(i) = y[static_cast<std::size_t>(i)];
  }
  d.D = Eigen::MatrixXd::Zero(n_splines - 2, n_splines);
  for (int r = 0; r < n_splines - 2; ++r) {
    d.D(r, r) = 1.0;
    d.D(r, r + 1) = -2.0;
    d.D(r, r + 2) = 1.0;
  }
  return d;
}

GamFit solve(const Design& d, int n_splines, double lambda) {
  const Eigen::Index n = d.B.rows(), r = d.D.rows();
  Eigen::MatrixXd aug(n + r, n_splines);
  aug << d.B, std::sqrt(lambda) * d.D;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + r);
  rhs.head(n) = d.y;
  GamFit f;
  f.n_splines = n_splines;
  f.knots = d.knots;
  f.lambda = lambda;
  f.x_min = d.lo;
  f.x_max = d.hi;
  f.coef = aug.colPivHouseholderQr().solve(rhs);

  Eigen::MatrixXd btb = d.B.transpose() * d.B;
  Eigen::MatrixXd a = btb + lambda * d.D.transpose() * d.D;
  Eigen::MatrixXd ainv = a.ldlt().solve(Eigen::MatrixXd::Identity(n_splines, n_splines));
  f.edf = (ainv * btb).trace();
  const double rss = (d.y - d.B * f.coef).squaredNorm();
  const double tss = (d.y.array() - d.y.mean()).matrix().squaredNorm();
  const double dof = static_cast<double>(n) - f.edf;
  f.gcv = static_cast<double>(n) * rss / (dof * dof);
  f.sigma2 = rss / dof;
  f.pseudo_r2 = tss > 0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
  f.cov = f.sigma2 * ainv;
  return f;
}

}  // namespace

GamFit fit_gam_fixed(std::span<const double> x, std::span<const double> y, int n_splines,
                     double lambda) {
  if (!(lambda >= 0)) throw std::invalid_argument("penalty weight must be non-negative");
  return solve(design(x, y, n_splines), n_splines, lambda);
}

GamFit fit_gam(std::span<const double> x, std::span<const double> y, int n_splines,
               const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
  Design d = design(x, y, n_splines);
  GamFit best;
  double best_gcv = std::numeric_limits<double>::infinity();
  for (double l : lambdas) {
    if (!(l >= 0)) throw std::invalid_argument("penalty weight must be non-negative");
    GamFit f = solve(d, n_splines, l);
    if (f.gcv < best_gcv) {
      best_gcv = f.gcv;
      best = std::move(f);
    }
  }
  return best;
}

std::vector<CurvePoint> gam_curve(const GamFit& fit, int points) {
  std::vector<CurvePoint> out;
  if (points < 2) points = 2;
  for (int i = 0; i < points; ++i) {
    double x = fit.x_min + (fit.x_max - fit.x_min) * i / (points - 1);
    double yh = fit.predict(x), s = fit.se(x);
    out.push_back({x, yh, yh - 1.96 * s, yh + 1.96 * s});
  }
  return out;
}

}  // namespace srp
