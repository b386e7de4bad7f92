#include "dimerlab/polynomial.hpp"

#include <stdexcept>

#include "dimerlab/kernels/kernels.hpp"

namespace dimerlab {

namespace {

std::vector<double> tilted(const MonomerPolynomial& p, double x) {
  std::vector<double> l(p.log_coeffs.size());
  for (std::size_t j = 0; j < l.size(); ++j) {
    l[j] = p.log_coeffs[j] == kNegInf ? kNegInf : p.log_coeffs[j] + static_cast<double>(j) * x;
  }
  return l;
}

}  // namespace

int MonomerPolynomial::degree() const {
  for (int j = static_cast<int>(log_coeffs.size()) - 1; j >= 0; --j)
    if (log_coeffs[j] != kNegInf) return j;
  return -1;
}

int MonomerPolynomial::lowest() const {
  for (int j = 0; j < static_cast<int>(log_coeffs.size()); ++j)
    if (log_coeffs[j] != kNegInf) return j;
  return -1;
}

double log_Z(const MonomerPolynomial& p, double x) {
  const auto l = tilted(p, x);
  return kernels::log_sum_exp(l);
}

std::vector<double> cumulants_U(const MonomerPolynomial& p, double x, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("cumulant order must be in 1..4");
  const auto l = tilted(p, x);
  const double norm = kernels::log_sum_exp(l);
  if (norm == kNegInf) throw std::invalid_argument("cumulants of an empty polynomial");
  // Mean first, then central moments around it so higher orders do not cancel.
  const auto raw = kernels::centered_power_sums(l, norm, 0.0, 0.0);
  const double mean = raw[1] / raw[0];
  const auto c = kernels::centered_power_sums(l, norm, 0.0, mean);
  // Correct for the O(eps) bias the mean estimate leaves in c[1].
  const double d = c[1] / c[0];
  const double m2 = c[2] / c[0] - d * d;
  const double m3 = c[3] / c[0] - 3 * d * (c[2] / c[0]) + 2 * d * d * d;
  const double m4 = c[4] / c[0] - 4 * d * (c[3] / c[0]) + 6 * d * d * (c[2] / c[0]) - 3 * d * d * d * d;

  std::vector<double> out{mean + d, m2, m3, m4 - 3 * m2 * m2};
  if (p.lowest() == p.degree()) {
    out[1] = out[2] = out[3] = 0.0;
  }
  out.resize(order);
  return out;
}

std::vector<double> pmf(const MonomerPolynomial& p, double x) {
  auto l = tilted(p, x);
  const double norm = kernels::log_sum_exp(l);
  for (auto& v : l) v = v == kNegInf ? 0.0 : std::exp(v - norm);
  return l;
}

}  // namespace dimerlab
