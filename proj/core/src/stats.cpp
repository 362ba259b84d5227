#include "promptsent/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "promptsent/errors.hpp"

namespace promptsent {

namespace {

bool is_missing(const std::string& v) { return v.empty() || v == csv::kMissing; }

std::vector<std::string> split_interaction(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto star = name.find('*', start);
    parts.push_back(name.substr(start, star - start));
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return parts;
}

}  // namespace

Design build_design(const csv::Table& data, const ModelSpec& spec) {
  if (spec.cluster_columns.size() > 2) throw InvalidArgument("at most two cluster columns");
  for (const auto& c : spec.continuous)
    if (c == spec.outcome) throw InvalidArgument("outcome '" + c + "' also listed as predictor");
  for (const auto& c : spec.categorical)
    if (c.column == spec.outcome) throw InvalidArgument("outcome '" + c.column + "' also listed as predictor");

  const auto y_col = data.require_column(spec.outcome);
  std::vector<std::size_t> cont_cols, cat_cols;
  for (const auto& c : spec.continuous) cont_cols.push_back(data.require_column(c));
  for (const auto& c : spec.categorical) cat_cols.push_back(data.require_column(c.column));
  std::vector<std::vector<std::size_t>> cluster_cols;
  for (const auto& c : spec.cluster_columns) {
    std::vector<std::size_t> parts;
    for (const auto& p : split_interaction(c)) parts.push_back(data.require_column(p));
    cluster_cols.push_back(std::move(parts));
  }

  Design d;
  d.cluster_ids.resize(cluster_cols.size());
  std::vector<double> ys;
  std::vector<std::vector<double>> conts;
  std::vector<std::vector<std::string>> cats;
  const auto& rows = data.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    const auto y = csv::parse_double(f[y_col]);
    bool ok = y.has_value();
    std::vector<double> cv;
    for (auto c : cont_cols) {
      const auto v = csv::parse_double(f[c]);
      if (!v) ok = false;
      cv.push_back(v.value_or(0.0));
    }
    std::vector<std::string> kv;
    for (auto c : cat_cols) {
      if (is_missing(f[c])) ok = false;
      kv.push_back(f[c]);
    }
    std::vector<std::string> ids;
    for (const auto& parts : cluster_cols) {
      std::string id;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        if (is_missing(f[parts[p]])) ok = false;
        if (p) id += '\x1f';
        id += f[parts[p]];
      }
      ids.push_back(std::move(id));
    }
    if (!ok) {
      ++d.dropped;
      continue;
    }
    d.rows.push_back(i);
    ys.push_back(*y);
    conts.push_back(std::move(cv));
    cats.push_back(std::move(kv));
    for (std::size_t c = 0; c < ids.size(); ++c) d.cluster_ids[c].push_back(std::move(ids[c]));
  }

  if (spec.include_intercept) d.columns.push_back("(intercept)");
  for (const auto& c : spec.continuous) d.columns.push_back(c);
  std::vector<std::vector<std::string>> dummy_levels;
  for (std::size_t t = 0; t < spec.categorical.size(); ++t) {
    std::set<std::string> levels;
    for (const auto& kv : cats) levels.insert(kv[t]);
    const auto& term = spec.categorical[t];
    std::string ref;
    if (term.reference) {
      if (!levels.count(*term.reference))
        throw InvalidArgument("reference level '" + *term.reference + "' of '" + term.column +
                              "' does not occur in the data");
      ref = *term.reference;
    } else if (!levels.empty()) {
      ref = *levels.begin();
    }
    std::vector<std::string> kept;
    for (const auto& l : levels)
      if (l != ref) {
        kept.push_back(l);
        d.columns.push_back(term.column + "=" + l);
      }
    dummy_levels.push_back(std::move(kept));
  }

  const auto n = static_cast<Eigen::Index>(ys.size());
  const auto k = static_cast<Eigen::Index>(d.columns.size());
  d.X = Eigen::MatrixXd::Zero(n, k);
  d.y = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    if (spec.include_intercept) d.X(i, j++) = 1.0;
    for (double v : conts[static_cast<std::size_t>(i)]) d.X(i, j++) = v;
    for (std::size_t t = 0; t < dummy_levels.size(); ++t)
      for (const auto& l : dummy_levels[t]) d.X(i, j++) = cats[static_cast<std::size_t>(i)][t] == l ? 1.0 : 0.0;
    d.y(i) = ys[static_cast<std::size_t>(i)];
  }
  return d;
}

OlsResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::string> names) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (y.size() != n) throw InvalidArgument("outcome length differs from design rows");
  if (k == 0) throw InvalidArgument("design has no columns");
  if (n <= k)
    throw InvalidArgument("need more observations (" + std::to_string(n) + ") than columns (" +
                          std::to_string(k) + ")");
  auto name = [&](Eigen::Index j) {
    return static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                      : "x" + std::to_string(j);
  };

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  if (rank < k) {
    std::vector<Eigen::Index> basis(perm.data(), perm.data() + rank);
    std::set<Eigen::Index> involved;
    Eigen::MatrixXd B(n, rank);
    for (Eigen::Index b = 0; b < rank; ++b) B.col(b) = X.col(basis[static_cast<std::size_t>(b)]);
    for (Eigen::Index r = rank; r < k; ++r) {
      const auto j = perm(r);
      involved.insert(j);
      if (rank == 0) continue;
      const Eigen::VectorXd coef = B.colPivHouseholderQr().solve(X.col(j));
      const double scale = std::max(1.0, coef.cwiseAbs().maxCoeff());
      for (Eigen::Index b = 0; b < rank; ++b)
        if (std::fabs(coef(b)) > 1e-8 * scale) involved.insert(basis[static_cast<std::size_t>(b)]);
    }
    std::vector<std::string> cols;
    for (auto j : involved) cols.push_back(name(j));
    throw RankDeficiencyError(std::move(cols));
  }

  OlsResult r;
  r.beta = qr.solve(y);
  r.residuals = y - X * r.beta;
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd R_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd inner = R_inv * R_inv.transpose();
  r.xtx_inv = qr.colsPermutation() * inner * qr.colsPermutation().transpose();

  const double ssr = r.residuals.squaredNorm();
  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  if (sst > 0.0) {
    r.r2 = 1.0 - ssr / sst;
    r.adj_r2 = 1.0 - (1.0 - r.r2) * static_cast<double>(n - 1) / static_cast<double>(n - k);
  } else {
    r.r2 = r.adj_r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

Eigen::VectorXd hc0_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const Eigen::MatrixXd& xtx_inv) {
  const Eigen::MatrixXd meat = X.transpose() * e.array().square().matrix().asDiagonal() * X;
  return (xtx_inv * meat * xtx_inv).diagonal().cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd hc0_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& e) {
  return hc0_se(X, e, ols_fit(X, e).xtx_inv);
}

Eigen::VectorXd cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                           std::span<const std::string> cluster_ids, const Eigen::MatrixXd& xtx_inv,
                           bool small_sample) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (static_cast<Eigen::Index>(cluster_ids.size()) != n)
    throw InvalidArgument("cluster ids length differs from design rows");
  std::map<std::string, Eigen::VectorXd, std::less<>> scores;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = scores.try_emplace(cluster_ids[static_cast<std::size_t>(i)]);
    if (fresh) it->second = Eigen::VectorXd::Zero(k);
    it->second += X.row(i).transpose() * e(i);
  }
  const auto g = scores.size();
  if (g < 2) throw InvalidArgument("clustered standard errors need at least two clusters");
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, s] : scores) meat.noalias() += s * s.transpose();
  Eigen::MatrixXd v = xtx_inv * meat * xtx_inv;
  if (small_sample) {
    const double gd = static_cast<double>(g);
    v *= gd / (gd - 1.0) * static_cast<double>(n - 1) / static_cast<double>(n - k);
  }
  return v.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd cluster_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                           std::span<const std::string> cluster_ids, bool small_sample) {
  return cluster_se(X, e, cluster_ids, ols_fit(X, e).xtx_inv, small_sample);
}

double normal_p_value(double z) {
  if (std::isnan(z)) return z;
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

std::size_t RegressionFit::index_of(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw InvalidArgument("no coefficient named '" + column + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

RegressionFit fit_model(const csv::Table& data, const ModelSpec& spec) {
  const auto d = build_design(data, spec);
  const auto ols = ols_fit(d.X, d.y, d.columns);
  RegressionFit fit;
  fit.columns = d.columns;
  fit.coefficients = ols.beta;
  fit.se_hc0 = hc0_se(d.X, ols.residuals, ols.xtx_inv);
  for (const auto& ids : d.cluster_ids)
    fit.se_cluster.push_back(cluster_se(d.X, ols.residuals, ids, ols.xtx_inv, spec.cluster_small_sample));
  fit.r2 = ols.r2;
  fit.adj_r2 = ols.adj_r2;
  fit.n = static_cast<std::size_t>(d.X.rows());
  fit.dropped = d.dropped;
  fit.residuals = ols.residuals;
  return fit;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile probability outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace promptsent
