#pragma once

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "potlp/estimate.hpp"

namespace potlp {

/* One supervised example: the oracle outcome of an explore action together
 * with the raw features seen when choosing it. cost_success is meaningful
 * only for p == 1 records, cost_failure only for p == 0 records. */
struct training_record {
  double p = 0;
  double cost_success = 0;
  double cost_failure = 0;
  std::vector<double> features;
};

/* Learned estimator: a logistic head for the success chance and one linear
 * head per cost, all over z-scored features. Normalization constants are
 * frozen at training time and applied at inference. */
struct feature_model_params {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> w_p, w_cs, w_cf; // weights in feature order
  double b_p = 0, b_cs = 0, b_cf = 0;  // biases, unpenalized
};

struct train_config {
  double l2 = 1e-3;
  int epochs = 2000;
  double lr = 0.5;
};

namespace detail {

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/* Solves a.x = b in place by Gaussian elimination with partial pivoting.
 * The systems here are tiny (one row per feature). */
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-12)
      fail(errc::degenerate_data, "cost regression matrix is singular");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      if (f == 0) continue;
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

} // namespace detail

/* Mean binary cross-entropy plus an L2 penalty on the weights (never the
 * bias). Exposed separately from training so the gradient can be checked
 * against finite differences. */
inline double logistic_loss(const std::vector<std::vector<double>>& x,
                            const std::vector<double>& y, const std::vector<double>& w,
                            double bias, double l2) {
  double loss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double z = detail::dot(w, x[i]) + bias;
    // numerically stable form of -y log p - (1-y) log (1-p)
    loss += std::max(z, 0.0) - y[i] * z + std::log1p(std::exp(-std::fabs(z)));
  }
  loss /= static_cast<double>(x.size());
  for (double v : w) loss += 0.5 * l2 * v * v;
  return loss;
}

inline std::pair<std::vector<double>, double> logistic_gradient(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    const std::vector<double>& w, double bias, double l2) {
  std::vector<double> gw(w.size(), 0.0);
  double gb = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double err = detail::sigmoid(detail::dot(w, x[i]) + bias) - y[i];
    for (size_t j = 0; j < w.size(); ++j) gw[j] += err * x[i][j];
    gb += err;
  }
  for (size_t j = 0; j < w.size(); ++j) gw[j] = gw[j] / x.size() + l2 * w[j];
  gb /= static_cast<double>(x.size());
  return {gw, gb};
}

/* Fits the three heads from scratch. The logistic head trains with
 * full-batch gradient descent from zero weights, so zero epochs leaves an
 * uninformed 0.5 predictor. Cost heads are ridge regressions solved in
 * closed form, each on the records where its outcome was observed. Both
 * outcome classes must be present. */
inline feature_model_params train_feature_model(const std::vector<training_record>& records,
                                                const std::vector<std::string>& names,
                                                train_config cfg = {}) {
  if (records.empty()) fail(errc::degenerate_data, "no training records");
  const size_t d = records.front().features.size();
  if (names.size() != d) fail(errc::param, "feature name count does not match records");
  for (const auto& r : records)
    if (r.features.size() != d) fail(errc::param, "inconsistent feature vector length");

  feature_model_params p;
  p.names = names;
  p.mean.assign(d, 0.0);
  p.stddev.assign(d, 0.0);
  for (const auto& r : records)
    for (size_t j = 0; j < d; ++j) p.mean[j] += r.features[j];
  for (size_t j = 0; j < d; ++j) p.mean[j] /= static_cast<double>(records.size());
  for (const auto& r : records)
    for (size_t j = 0; j < d; ++j) {
      double v = r.features[j] - p.mean[j];
      p.stddev[j] += v * v;
    }
  for (size_t j = 0; j < d; ++j) {
    p.stddev[j] = std::sqrt(p.stddev[j] / static_cast<double>(records.size()));
    if (p.stddev[j] < 1e-12) p.stddev[j] = 1.0; // constant feature: pass through
  }

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(records.size());
  for (const auto& r : records) {
    std::vector<double> row(d);
    for (size_t j = 0; j < d; ++j) row[j] = (r.features[j] - p.mean[j]) / p.stddev[j];
    x.push_back(std::move(row));
    y.push_back(r.p);
  }
  size_t successes = 0;
  for (double v : y) successes += v > 0.5;
  if (successes == 0 || successes == records.size())
    fail(errc::degenerate_data, "training data has a single outcome class");

  p.w_p.assign(d, 0.0);
  for (int e = 0; e < cfg.epochs; ++e) {
    auto [gw, gb] = logistic_gradient(x, y, p.w_p, p.b_p, cfg.l2);
    for (size_t j = 0; j < d; ++j) p.w_p[j] -= cfg.lr * gw[j];
    p.b_p -= cfg.lr * gb;
  }

  auto fit_ridge = [&](bool want_success, std::vector<double>& w_out, double& b_out) {
    // normal equations over [features, 1] with the bias row unpenalized
    std::vector<std::vector<double>> ata(d + 1, std::vector<double>(d + 1, 0.0));
    std::vector<double> atb(d + 1, 0.0);
    for (size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if ((r.p > 0.5) != want_success) continue;
      double target = want_success ? r.cost_success : r.cost_failure;
      std::vector<double> row = x[i];
      row.push_back(1.0);
      for (size_t a = 0; a <= d; ++a) {
        for (size_t b = 0; b <= d; ++b) ata[a][b] += row[a] * row[b];
        atb[a] += row[a] * target;
      }
    }
    for (size_t j = 0; j < d; ++j) ata[j][j] += cfg.l2 > 0 ? cfg.l2 : 1e-9;
    std::vector<double> beta = detail::solve_linear(std::move(ata), std::move(atb));
    b_out = beta.back();
    beta.pop_back();
    w_out = std::move(beta);
  };
  fit_ridge(true, p.w_cs, p.b_cs);
  fit_ridge(false, p.w_cf, p.b_cf);
  return p;
}

/* Applies the trained heads to raw features, z-scoring with the stored
 * constants, then clamps like every non-oracle estimator. */
inline estimate_triple feature_estimate(const feature_model_params& p,
                                        const std::vector<double>& raw) {
  if (raw.size() != p.mean.size()) fail(errc::param, "feature vector length mismatch");
  std::vector<double> z(raw.size());
  for (size_t j = 0; j < raw.size(); ++j) z[j] = (raw[j] - p.mean[j]) / p.stddev[j];
  estimate_triple t;
  t.p_success = detail::sigmoid(detail::dot(p.w_p, z) + p.b_p);
  t.cost_success = detail::dot(p.w_cs, z) + p.b_cs;
  t.cost_failure = detail::dot(p.w_cf, z) + p.b_cf;
  return clamp_estimate(t);
}

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

inline double parse_double(const std::string& token, const char* what) {
  try {
    size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size()) fail(errc::param, std::string("trailing junk in ") + what);
    return v;
  } catch (const std::logic_error&) {
    fail(errc::param, std::string("bad number in ") + what + ": " + token);
  }
}

} // namespace detail

/* Record file: a version token, a tab-separated header naming the label and
 * feature columns, then one record per line. */
inline void write_training_records(std::ostream& out, const std::vector<training_record>& records,
                                   const std::vector<std::string>& names) {
  out << "trainingdata v1\n";
  out << "p\tcs\tcf";
  for (const auto& n : names) out << '\t' << n;
  out << '\n';
  for (const auto& r : records) {
    out << detail::format_double(r.p) << '\t' << detail::format_double(r.cost_success) << '\t'
        << detail::format_double(r.cost_failure);
    for (double f : r.features) out << '\t' << detail::format_double(f);
    out << '\n';
  }
}

struct training_data {
  std::vector<std::string> names;
  std::vector<training_record> records;
};

inline training_data parse_training_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "trainingdata v1")
    fail(errc::param, "expected 'trainingdata v1' header");
  if (!std::getline(in, line)) fail(errc::param, "missing column header");
  training_data data;
  {
    std::istringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, '\t')) cols.push_back(col);
    if (cols.size() < 3 || cols[0] != "p" || cols[1] != "cs" || cols[2] != "cf")
      fail(errc::param, "record header must start with p, cs, cf");
    data.names.assign(cols.begin() + 3, cols.end());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    std::vector<double> values;
    while (std::getline(row, token, '\t'))
      values.push_back(detail::parse_double(token, "training record"));
    if (values.size() != data.names.size() + 3)
      fail(errc::param, "record column count does not match header");
    training_record r;
    r.p = values[0];
    r.cost_success = values[1];
    r.cost_failure = values[2];
    r.features.assign(values.begin() + 3, values.end());
    data.records.push_back(std::move(r));
  }
  return data;
}

/* Model file: version token, feature names, one normalization line of
 * mean:stddev pairs, then one line per head with the bias first. */
inline void write_feature_model(std::ostream& out, const feature_model_params& p) {
  out << "model v1\n";
  out << "features";
  for (const auto& n : p.names) out << ' ' << n;
  out << '\n';
  out << "norm";
  for (size_t j = 0; j < p.mean.size(); ++j)
    out << ' ' << detail::format_double(p.mean[j]) << ':' << detail::format_double(p.stddev[j]);
  out << '\n';
  auto head = [&](const char* tag, const std::vector<double>& w, double bias) {
    out << "head " << tag << ' ' << detail::format_double(bias);
    for (double v : w) out << ' ' << detail::format_double(v);
    out << '\n';
  };
  head("p", p.w_p, p.b_p);
  head("cs", p.w_cs, p.b_cs);
  head("cf", p.w_cf, p.b_cf);
}

inline feature_model_params parse_feature_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "model v1")
    fail(errc::param, "expected 'model v1' header");
  feature_model_params p;
  if (!std::getline(in, line)) fail(errc::param, "missing features line");
  {
    std::istringstream row(line);
    std::string token;
    row >> token;
    if (token != "features") fail(errc::param, "expected features line");
    while (row >> token) p.names.push_back(token);
  }
  if (!std::getline(in, line)) fail(errc::param, "missing normalization line");
  {
    std::istringstream row(line);
    std::string token;
    row >> token;
    if (token != "norm") fail(errc::param, "expected norm line");
    while (row >> token) {
      size_t sep = token.find(':');
      if (sep == std::string::npos) fail(errc::param, "norm entries must be mean:stddev");
      p.mean.push_back(detail::parse_double(token.substr(0, sep), "norm mean"));
      p.stddev.push_back(detail::parse_double(token.substr(sep + 1), "norm stddev"));
    }
    if (p.mean.size() != p.names.size()) fail(errc::param, "norm count does not match features");
  }
  bool have_p = false, have_cs = false, have_cf = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token, tag;
    row >> token >> tag;
    if (token != "head") fail(errc::param, "expected head line, got: " + line);
    std::vector<double> values;
    while (row >> token) values.push_back(detail::parse_double(token, "head weights"));
    if (values.size() != p.names.size() + 1)
      fail(errc::param, "head weight count does not match features");
    double bias = values.front();
    values.erase(values.begin());
    if (tag == "p") {
      p.b_p = bias;
      p.w_p = values;
      have_p = true;
    } else if (tag == "cs") {
      p.b_cs = bias;
      p.w_cs = values;
      have_cs = true;
    } else if (tag == "cf") {
      p.b_cf = bias;
      p.w_cf = values;
      have_cf = true;
    } else {
      fail(errc::param, "unknown head tag: " + tag);
    }
  }
  if (!have_p || !have_cs || !have_cf) fail(errc::param, "model file is missing a head");
  return p;
}

} // namespace potlp
