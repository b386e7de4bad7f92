#include "dimerlab/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dimerlab::stats {

Summary summarize(const std::vector<double>& x) {
  Summary s;
  s.count = static_cast<int>(x.size());
  if (x.empty()) return s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / s.count;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= s.count;
  m3 /= s.count;
  m4 /= s.count;
  s.var = s.count > 1 ? m2 * s.count / (s.count - 1) : 0.0;
  if (m2 > 0) {
    s.skew = m3 / std::pow(m2, 1.5);
    s.ex_kurt = m4 / (m2 * m2) - 3.0;
  }
  s.var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / s.count);
  return s;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_normal(const std::vector<double>& x) {
  const auto s = summarize(x);
  if (s.count < 2 || s.var <= 0) return 0.0;
  const double sd = std::sqrt(s.var);
  std::vector<double> z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - s.mean) / sd;
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double f = normal_cdf(z[k]);
    d = std::max({d, std::fabs((k + 1) / m - f), std::fabs(f - k / m)});
  }
  return d;
}

double ks_normal_jittered(const std::vector<double>& x, double spacing, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5 * spacing, 0.5 * spacing);
  std::vector<double> y(x);
  for (auto& v : y) v += u(rng);
  return ks_normal(y);
}

double lattice_normal_distance(const std::vector<double>& values, const std::vector<double>& probs, double mean,
                               double sd) {
  if (values.size() != probs.size()) throw std::invalid_argument("values and probabilities differ in length");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double cdf = 0.0;
  double d = 0.0;
  for (std::size_t k : order) {
    if (probs[k] <= 0) continue;
    const double phi = normal_cdf((values[k] - mean) / sd);
    d = std::max(d, std::fabs(cdf - phi));
    cdf += probs[k];
    d = std::max(d, std::fabs(cdf - phi));
  }
  return d;
}

double lattice_normal_distance_corrected(const std::vector<double>& values, const std::vector<double>& probs,
                                         double mean, double sd) {
  if (values.size() != probs.size()) throw std::invalid_argument("values and probabilities differ in length");
  std::vector<double> atoms;
  std::vector<double> mass;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (probs[k] <= 0) continue;
    atoms.push_back(values[k]);
    mass.push_back(probs[k]);
  }
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  double span = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double gap = atoms[order[k]] - atoms[order[k - 1]];
    span = span == 0.0 ? gap : std::min(span, gap);
  }
  double cdf = 0.0;
  double d = 0.0;
  for (std::size_t k : order) {
    cdf += mass[k];
    d = std::max(d, std::fabs(cdf - normal_cdf((atoms[k] + span / 2 - mean) / sd)));
  }
  return d;
}

ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                         double min_expected) {
  if (observed.size() != probs.size()) throw std::invalid_argument("observed and expected differ in length");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  ChiSquare c;
  double pooled_obs = 0, pooled_exp = 0;
  int bins = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = probs[k] * total;
    if (e < min_expected) {
      pooled_obs += observed[k];
      pooled_exp += e;
      continue;
    }
    c.statistic += (observed[k] - e) * (observed[k] - e) / e;
    ++bins;
  }
  if (pooled_exp > 0) {
    c.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  }
  c.dof = bins - 1;
  c.p_value = c.dof > 0 ? boost::math::gamma_q(0.5 * c.dof, 0.5 * c.statistic) : 1.0;
  return c;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto sa = summarize(a);
  const auto sb = summarize(b);
  if (sa.var <= 0 || sb.var <= 0) return 0.0;
  double c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += (a[k] - sa.mean) * (b[k] - sb.mean);
  c /= static_cast<double>(a.size() - 1);
  return c / std::sqrt(sa.var * sb.var);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto sx = summarize(x);
  const auto sy = summarize(y);
  if (sx.var <= 0) return 0.0;
  double c = 0;
  for (std::size_t k = 0; k < x.size(); ++k) c += (x[k] - sx.mean) * (y[k] - sy.mean);
  return c / (static_cast<double>(x.size() - 1) * sx.var);
}

}  // namespace dimerlab::stats
