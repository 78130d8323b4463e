#include <cmath>
#include <sstream>

#include "srpkit/fp_analysis.hpp"

namespace srp {

namespace {

double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

class Model {
 public:
  explicit Model(const LogisticProblem& p) : p_(p) {
    n_ = p.X.rows();
    k_ = p.X.cols();
    q_ = 0;
    for (const auto& g : p.groups) {
      if (static_cast<Eigen::Index>(g.level.size()) != n_)
        throw std::invalid_argument("grouping factor " + g.name + " has " +
                                    std::to_string(g.level.size()) + " entries for " +
                                    std::to_string(n_) + " observations");
      offset_.push_back(q_);
      q_ += g.n_levels;
    }
  }

  Eigen::Index dim() const { return k_ + q_; }
  Eigen::Index q() const { return q_; }

  Eigen::VectorXd eta(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd e = p_.X * theta.head(k_);
    for (std::size_t f = 0; f < p_.groups.size(); ++f)
      for (Eigen::Index i = 0; i < n_; ++i)
        e(i) += theta(k_ + offset_[f] + p_.groups[f].level[static_cast<std::size_t>(i)]);
    return e;
  }

  double loglik(const Eigen::VectorXd& e) const {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) ll += p_.y(i) * e(i) - log1pexp(e(i));
    return ll;
  }

  Eigen::VectorXd precision(const std::vector<double>& sigma) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim());
    for (std::size_t f = 0; f < p_.groups.size(); ++f)
      d.segment(k_ + offset_[f], p_.groups[f].n_levels).setConstant(1.0 / (sigma[f] * sigma[f]));
    return d;
  }

  double penalised(const Eigen::VectorXd& theta, const Eigen::VectorXd& prec) const {
    return loglik(eta(theta)) - 0.5 * theta.cwiseProduct(prec).dot(theta);
  }

  // C'WC with C = [X Z], plus the gradient C'(y - mu).
  void information(const Eigen::VectorXd& theta, Eigen::MatrixXd& info,
                   Eigen::VectorXd& grad) const {
    const Eigen::Index d = dim();
    info.setZero(d, d);
    grad.setZero(d);
    Eigen::VectorXd e = eta(theta);
    std::vector<Eigen::Index> cols(p_.groups.size());
    for (Eigen::Index i = 0; i < n_; ++i) {
      double mu = sigmoid(e(i));
      double w = mu * (1.0 - mu);
      double r = p_.y(i) - mu;
      auto xi = p_.X.row(i);
      info.topLeftCorner(k_, k_).noalias() += w * xi.transpose() * xi;
      grad.head(k_) += r * xi.transpose();
      for (std::size_t f = 0; f < p_.groups.size(); ++f) {
        Eigen::Index c = k_ + offset_[f] + p_.groups[f].level[static_cast<std::size_t>(i)];
        cols[f] = c;
        info.block(0, c, k_, 1) += w * xi.transpose();
        grad(c) += r;
      }
      for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) info(cols[a], cols[b]) += w;
    }
    info.bottomLeftCorner(q_, k_) = info.topRightCorner(k_, q_).transpose();
  }

  struct Mode {
    double penalised = 0.0;
    double laplace = 0.0;
    Eigen::MatrixXd hessian;  // information + precision at the mode
    int iterations = 0;
  };

  // Joint Newton for fixed variances; theta is updated in place.
  Mode solve(Eigen::VectorXd& theta, const std::vector<double>& sigma, const FitOptions& opt,
             std::vector<std::string>& trace) const {
    Eigen::VectorXd prec = precision(sigma);
    Eigen::MatrixXd info;
    Eigen::VectorXd grad;
    double obj = penalised(theta, prec);
    std::vector<std::string> local;
    Mode m;
    for (int it = 1;; ++it) {
      information(theta, info, grad);
      grad -= prec.cwiseProduct(theta);
      Eigen::MatrixXd h = info;
      h.diagonal() += prec;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      Eigen::VectorXd step = ldlt.solve(grad);
      double decrement = grad.dot(step);
      std::ostringstream os;
      os << "newton " << it << ": objective " << obj << ", decrement " << decrement;
      local.push_back(os.str());
      if (!std::isfinite(decrement)) {
        trace.insert(trace.end(), local.begin(), local.end());
        throw ConvergenceError("Newton step is not finite", trace);
      }
      if (decrement < opt.tol) {
        m.iterations = it;
        m.hessian = std::move(h);
        break;
      }
      if (it >= opt.max_newton) {
        trace.insert(trace.end(), local.begin(), local.end());
        throw ConvergenceError("no convergence after " + std::to_string(it) + " Newton steps",
                               trace);
      }
      double t = 1.0;
      Eigen::VectorXd next;
      double next_obj = 0.0;
      int halvings = 0;
      for (;;) {
        next = theta + t * step;
        next_obj = penalised(next, prec);
        if (std::isfinite(next_obj) && next_obj >= obj - 1e-12) break;
        if (++halvings > 40) {
          trace.insert(trace.end(), local.begin(), local.end());
          throw ConvergenceError("step halving failed to improve the objective", trace);
        }
        t *= 0.5;
      }
      theta = next;
      obj = next_obj;
    }
    m.penalised = obj;
    m.laplace = obj;
    if (q_ > 0) {
      // -1/2 log det(I + L Z'WZ L), L = diag(sigma)
      Eigen::MatrixXd zwz = info.bottomRightCorner(q_, q_);
      Eigen::VectorXd s(q_);
      for (std::size_t f = 0; f < p_.groups.size(); ++f)
        s.segment(offset_[f], p_.groups[f].n_levels).setConstant(sigma[f]);
      Eigen::MatrixXd a = s.asDiagonal() * zwz * s.asDiagonal();
      a.diagonal().array() += 1.0;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < q_; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
      m.laplace -= 0.5 * logdet;
    }
    return m;
  }

 private:
  const LogisticProblem& p_;
  Eigen::Index n_ = 0, k_ = 0, q_ = 0;
  std::vector<Eigen::Index> offset_;
};

void check_separation(const LogisticProblem& p) {
  for (Eigen::Index c = 0; c < p.X.cols(); ++c) {
    const auto col = p.X.col(c);
    if (col.maxCoeff() == col.minCoeff()) continue;  // intercept
    double max0 = -INFINITY, min0 = INFINITY, max1 = -INFINITY, min1 = INFINITY;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (p.y(i) > 0.5) {
        max1 = std::max(max1, col(i));
        min1 = std::min(min1, col(i));
      } else {
        max0 = std::max(max0, col(i));
        min0 = std::min(min0, col(i));
      }
    }
    if (max0 <= min1 || max1 <= min0)
      throw SeparationError(p.names[static_cast<std::size_t>(c)],
                            "outcome is separated by predictor " +
                                p.names[static_cast<std::size_t>(c)]);
  }
}

}  // namespace

FitResult fit_logistic(const LogisticProblem& p, const FitOptions& opt) {
  const Eigen::Index n = p.X.rows();
  if (p.y.size() != n) throw std::invalid_argument("outcome length differs from design rows");
  if (p.names.size() != static_cast<std::size_t>(p.X.cols()))
    throw std::invalid_argument("one name per design column required");
  double pos = p.y.sum();
  if (pos < 1 || pos > static_cast<double>(n) - 1)
    throw std::invalid_argument("logistic fit needs both outcome classes");
  check_separation(p);

  Model model(p);
  FitResult res;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(model.dim());
  double ybar = pos / static_cast<double>(n);
  theta(0) = std::log(ybar / (1.0 - ybar));

  std::vector<double> sigma(p.groups.size(), 0.5);
  auto eval = [&](const std::vector<double>& s) {
    Eigen::VectorXd th = theta;
    auto m = model.solve(th, s, opt, res.trace);
    std::ostringstream os;
    os << "sigma";
    for (double v : s) os << " " << v;
    os << ": laplace " << m.laplace << " after " << m.iterations << " steps";
    res.trace.push_back(os.str());
    return std::pair{m.laplace, th};
  };

  if (!p.groups.empty()) {
    const double lo = std::log(opt.sigma_lo), hi = std::log(opt.sigma_hi);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < (p.groups.size() == 1 ? 1 : opt.sweeps); ++sweep) {
      for (std::size_t f = 0; f < p.groups.size(); ++f) {
        auto at = [&](double t) {
          auto s = sigma;
          s[f] = std::exp(t);
          auto r = eval(s);
          theta = r.second;  // warm start
          return r.first;
        };
        double a = lo, b = hi;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = at(c), fd = at(d);
        while (b - a > 1e-4) {
          if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
          } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
          }
        }
        double best = 0.5 * (a + b);
        // The boundary wins when the likelihood keeps rising towards it.
        double f_mid = at(best), f_lo = at(lo);
        sigma[f] = std::exp(f_lo > f_mid ? lo : best);
      }
    }
  }

  auto final_mode = model.solve(theta, sigma, opt, res.trace);
  const Eigen::Index k = p.X.cols();
  Eigen::MatrixXd cov = final_mode.hessian.ldlt().solve(
      Eigen::MatrixXd::Identity(model.dim(), model.dim()));
  res.names = p.names;
  res.coef = theta.head(k);
  res.se = cov.diagonal().head(k).cwiseMax(0.0).cwiseSqrt();
  for (std::size_t f = 0; f < p.groups.size(); ++f) {
    res.group_names.push_back(p.groups[f].name);
    res.group_sd.push_back(sigma[f]);
  }
  res.loglik = final_mode.laplace;
  res.n_params = static_cast<int>(k + static_cast<Eigen::Index>(p.groups.size()));
  res.aic = -2.0 * res.loglik + 2.0 * res.n_params;
  res.n_obs = static_cast<long>(n);
  Eigen::VectorXd e = model.eta(theta);
  res.fitted = e.unaryExpr([](double v) { return sigmoid(v); });

  for (Eigen::Index c = 0; c < k; ++c)
    if (std::fabs(res.coef(c)) > opt.separation_bound || !std::isfinite(res.coef(c)))
      throw SeparationError(p.names[static_cast<std::size_t>(c)],
                            "coefficient of " + p.names[static_cast<std::size_t>(c)] +
                                " diverges (quasi-separation)");

  std::vector<double> probs(res.fitted.data(), res.fitted.data() + n);
  std::vector<int> outcomes(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) outcomes[static_cast<std::size_t>(i)] = p.y(i) > 0.5;
  res.concordance = concordance(probs, outcomes);
  return res;
}

}  // namespace srp
