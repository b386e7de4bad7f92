#include "dimerlab/jacobi.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dimerlab/leeyang.hpp"
#include "dimerlab/logspace.hpp"
#include "dimerlab/transfer.hpp"

namespace dimerlab {

JacobiMatrix JacobiMatrix::from(const CylinderGraph& g, const WeightAssignment& w) {
  if (g.fiber_size() != 1) throw std::invalid_argument("the Jacobi representation needs h = 1");
  JacobiMatrix a;
  a.nu = w.nu;
  a.omega = w.omega;
  a.omega_tilde = w.omega_tilde;
  return a;
}

JacobiMatrix JacobiMatrix::gauged() const {
  JacobiMatrix b;
  b.nu.assign(nu.size(), 0.0);
  b.omega = omega_tilde;
  b.omega_tilde = omega_tilde;
  return b;
}

Determinant det_abs(const JacobiMatrix& a) {
  // D_k = i e^{nu_k} D_{k-1} - e^{omega_{k-1}} D_{k-2}, D_{-1} = 1, D_{-2} = 0.
  Determinant prev2{kNegInf, 0, true};
  Determinant prev1{0.0, 0, true};
  bool consistent = true;
  for (int k = 0; k < a.size(); ++k) {
    const double m1 = a.nu[k] + prev1.log_abs;
    const int p1 = (prev1.phase + 1) % 4;
    const double m2 = k == 0 ? kNegInf : a.omega[k - 1] + prev2.log_abs;
    const int p2 = (prev2.phase + 2) % 4;
    Determinant cur;
    if (m2 == kNegInf) {
      cur = {m1, p1, true};
    } else if (m1 == kNegInf) {
      cur = {m2, p2, true};
    } else {
      if (p1 != p2) consistent = false;
      cur = {log_add(m1, m2), p1, true};
    }
    prev2 = prev1;
    prev1 = cur;
  }
  prev1.phase_consistent = consistent;
  return prev1;
}

std::vector<double> omega_spectrum(const JacobiMatrix& a) {
  const int n = a.size();
  if (n == 0) return {};
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k + 1 < n; ++k) sub[k] = std::exp(0.5 * a.omega_tilde[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolve did not converge");
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(out.begin(), out.end());
  return out;
}

double resolvent_U(const JacobiMatrix& a, double x) {
  const double e = std::exp(2.0 * x);
  double u = 0.0;
  for (double mu : omega_spectrum(a)) u += e / (mu * mu + e);
  return u;
}

JacobiReport jacobi_report(const CylinderGraph& g, const WeightAssignment& w, const std::vector<double>& x_grid,
                           bool with_spectrum) {
  const auto a = JacobiMatrix::from(g, w);
  JacobiReport r;
  r.n = a.size();
  const double lz = log_partition(g, w);
  const auto d = det_abs(a);
  r.det_residual = std::fabs(d.log_abs - lz);
  r.phase_ok = d.phase_consistent && d.phase == r.n % 4;
  const auto dg = det_abs(a.gauged());
  r.gauge_residual = std::fabs(dg.log_abs - (lz - w.gauge_offset));
  const auto eig = omega_spectrum(a);
  if (with_spectrum) {
    const auto atoms = spectrum_exact(g, w).signed_atoms();
    if (atoms.size() != eig.size()) {
      r.eigen_residual = std::numeric_limits<double>::infinity();
    } else {
      for (std::size_t k = 0; k < eig.size(); ++k) r.eigen_residual = std::max(r.eigen_residual, std::fabs(eig[k] - atoms[k]));
    }
  }
  for (double x : x_grid) {
    const double mean = count_moments(g, w, CountingMask::all(g), x).mean;
    r.resolvent_residual = std::max(r.resolvent_residual, std::fabs(resolvent_U(a, x) - mean));
  }
  return r;
}

LyapunovReport lyapunov_check(const std::vector<LyapunovSample>& table) {
  struct Acc {
    double lz = 0, lzt = 0, nu = 0;
    int count = 0;
  };
  std::map<int, Acc> by_n;
  for (const auto& s : table) {
    auto& a = by_n[s.n];
    a.lz += s.log_z;
    a.lzt += std::isnan(s.log_z_tilde) ? s.log_z - s.sum_nu : s.log_z_tilde;
    a.nu += s.sum_nu;
    ++a.count;
  }
  LyapunovReport rep;
  for (const auto& [n, a] : by_n) {
    LyapunovRow row;
    row.n = n;
    row.f_hat = a.lz / a.count / n;
    row.gamma_hat = a.lzt / a.count / n;
    row.mean_nu = a.nu / a.count / n;
    row.gap = std::fabs(row.f_hat - (row.gamma_hat - row.mean_nu));
    row.gauge_residual = std::fabs(row.f_hat - (row.gamma_hat + row.mean_nu));
    rep.rows.push_back(row);
  }
  if (rep.rows.size() < 2) return rep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(rep.rows.size());
  for (const auto& r : rep.rows) {
    const double x = std::log(static_cast<double>(r.n)), y = std::log(std::max(r.gap, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.gap_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.gap_shrinking = rep.gap_slope < 0 && rep.rows.back().gap < rep.rows.front().gap;
  return rep;
}

}  // namespace dimerlab
