#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srpkit/records.hpp"

namespace srp {

enum class Variant { Base, FineTuned };
Variant parse_variant(std::string_view s);
std::string_view to_string(Variant v);

inline const std::vector<std::string> kFpPredictors = {"nxtwS_tgt", "nxtwS_src", "nxtwS_mt",
                                                       "AvS_tgt",   "AvS_src",   "AvS_mt"};

struct FPObservation {
  int outcome = 0;
  // In predictor order of kFpPredictors; raw bits until z-scored.
  std::array<double, 6> x{};
  std::string speaker_id;
  std::string doc_id;
  std::string direction;
  std::string word_id;
};

struct Scaling {
  double mean = 0.0;
  double sd = 1.0;
};

struct FPDataset {
  std::vector<FPObservation> obs;
  std::array<Scaling, 6> scaling{};
  long skipped_unaligned = 0;
  long skipped_unscored = 0;
};

// Builds one observation per scored, reverse-aligned target surface word of
// `direction` ("DE-EN"). The outcome is 1 when the nearest preceding
// non-expansion row of the same segment is a filler particle. Source and
// target rows are told apart by comparing lang with the lpair. Predictors
// are z-scored within the dataset; a constant predictor throws.
FPDataset build_fp_dataset(const std::vector<WordRow>& rows, std::string_view direction,
                           Variant variant = Variant::Base, bool zscore = true);

class SeparationError : public std::runtime_error {
 public:
  SeparationError(std::string predictor, const std::string& what)
      : std::runtime_error(what), predictor_(std::move(predictor)) {}
  const std::string& predictor() const noexcept { return predictor_; }

 private:
  std::string predictor_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<std::string> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::string> trace_;
};

struct GroupingFactor {
  std::string name;
  std::vector<int> level;  // per observation, 0-based
  int n_levels = 0;
  std::vector<std::string> labels;
};

GroupingFactor make_factor(std::string name, const std::vector<std::string>& values);

struct LogisticProblem {
  Eigen::MatrixXd X;  // first column is the intercept
  Eigen::VectorXd y;
  std::vector<std::string> names;
  std::vector<GroupingFactor> groups;
};

// Intercept plus the six predictors; random intercepts per listed factor
// ("speaker_id", "doc_id").
LogisticProblem make_problem(const FPDataset& data, const std::vector<std::string>& random);

struct FitOptions {
  int max_newton = 100;
  double tol = 1e-8;
  double sigma_lo = 1e-3;
  double sigma_hi = 10.0;
  int sweeps = 3;
  double separation_bound = 25.0;
};

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  std::vector<std::string> group_names;
  std::vector<double> group_sd;
  double loglik = 0.0;  // Laplace approximation of the marginal likelihood
  double aic = 0.0;
  double concordance = 0.5;
  long n_obs = 0;
  int n_params = 0;
  Eigen::VectorXd fitted;  // conditional probabilities
  std::vector<std::string> trace;
};

// Logistic regression with Gaussian random intercepts, fitted by the
// Laplace approximation: joint Newton on fixed and random effects for
// given variances, golden-section search on each log standard deviation.
// Plain logistic regression when `groups` is empty.
FitResult fit_logistic(const LogisticProblem& p, const FitOptions& opt = {});

// Fraction of concordant (positive, negative) pairs, ties counted 1/2.
// Throws std::invalid_argument on length mismatch or a single class.
double concordance(std::span<const double> probs, std::span<const int> outcomes);

struct ModelComparison {
  double delta_aic = 0.0;  // a - b
  double delta_c = 0.0;    // a - b
  std::string preferred;   // "a", "b" or "tie"
};

ModelComparison compare_models(const FitResult& a, const FitResult& b);

}  // namespace srp
