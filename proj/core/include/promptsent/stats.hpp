#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "promptsent/csv.hpp"

namespace promptsent {

struct CategoricalTerm {
  std::string column;
  // Defaults to the smallest level (string order) present after deletion.
  std::optional<std::string> reference;
};

// Linear model over the columns of a table. A cluster column written "a*b"
// clusters on the interaction of columns a and b.
struct ModelSpec {
  std::string outcome;
  std::vector<std::string> continuous;
  std::vector<CategoricalTerm> categorical;
  std::vector<std::string> cluster_columns;  // at most two
  bool include_intercept = true;
  // Scales clustered variances by G/(G-1) * (n-1)/(n-k).
  bool cluster_small_sample = false;
};

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> columns;
  // cluster_ids[c][i]: cluster of retained row i under cluster column c.
  std::vector<std::vector<std::string>> cluster_ids;
  std::vector<std::size_t> rows;  // source row index of each retained row
  std::size_t dropped = 0;        // rows removed by listwise deletion
};

// Intercept first, then continuous columns in order, then one dummy
// "column=level" per non-reference level (levels in string order). Rows with
// a missing or non-numeric value in any used column are dropped.
Design build_design(const csv::Table& data, const ModelSpec& spec);

struct OlsResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtx_inv;
  double r2 = 0.0;
  double adj_r2 = 0.0;
};

// Least squares through column-pivoted Householder QR. Throws
// RankDeficiencyError naming the collinear columns (names default to
// "x0", "x1", ...).
OlsResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  std::span<const std::string> names = {});

// sqrt(diag(B X' diag(e^2) X B)) with B = (X'X)^-1.
Eigen::VectorXd hc0_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                       const Eigen::MatrixXd& xtx_inv);
Eigen::VectorXd hc0_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals);

// Liang-Zeger sandwich with meat sum_g (X_g' e_g)(X_g' e_g)'. Needs at least
// two clusters.
Eigen::VectorXd cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                           std::span<const std::string> cluster_ids, const Eigen::MatrixXd& xtx_inv,
                           bool small_sample = false);
Eigen::VectorXd cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                           std::span<const std::string> cluster_ids, bool small_sample = false);

// Two-sided p-value of z under the standard normal.
double normal_p_value(double z);

struct RegressionFit {
  std::vector<std::string> columns;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd se_hc0;
  std::vector<Eigen::VectorXd> se_cluster;  // one per cluster column
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::size_t n = 0;
  std::size_t dropped = 0;
  Eigen::VectorXd residuals;

  std::size_t index_of(const std::string& column) const;
};

RegressionFit fit_model(const csv::Table& data, const ModelSpec& spec);

// Type-7 (linear interpolation) sample quantile, p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace promptsent
