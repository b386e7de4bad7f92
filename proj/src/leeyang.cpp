#include "dimerlab/leeyang.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "detail/mp.hpp"
#include "detail/transfer_engine.hpp"

namespace dimerlab {

namespace {

using detail::Mask;
using detail::Mp;

// Linear-space coefficients at the working MPFR precision.
struct MpPolyRing {
  struct Value {
    int lo = 0;
    std::vector<Mp> c;
  };
  static Value zero() { return {}; }
  static Value one() { return {0, {Mp(1.0)}}; }
  static bool is_zero(const Value& v) { return v.c.empty(); }
  static Value monomer(double nu, bool counted, double) {
    if (nu == kNegInf) return zero();
    return {counted ? 1 : 0, {Mp::exp_of(nu)}};
  }
  static Value weight(double lw) {
    if (lw == kNegInf) return zero();
    return {0, {Mp::exp_of(lw)}};
  }
  static Value mul(const Value& a, const Value& b) {
    if (is_zero(a) || is_zero(b)) return zero();
    Value out{a.lo + b.lo, std::vector<Mp>(a.c.size() + b.c.size() - 1)};
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
  }
  static void add_to(Value& acc, const Value& v) {
    if (is_zero(v)) return;
    if (is_zero(acc)) {
      acc = v;
      return;
    }
    const int lo = std::min(acc.lo, v.lo);
    const int hi = std::max(acc.lo + static_cast<int>(acc.c.size()), v.lo + static_cast<int>(v.c.size()));
    std::vector<Mp> c(static_cast<std::size_t>(hi - lo));
    for (std::size_t k = 0; k < acc.c.size(); ++k) c[acc.lo - lo + k] = acc.c[k];
    for (std::size_t k = 0; k < v.c.size(); ++k) c[v.lo - lo + k] += v.c[k];
    acc = {lo, std::move(c)};
  }

  class Accumulator {
   public:
    void add(Mask, const Value& big, double shift, const Value& local) {
      Value t = mul(big, local);
      if (shift != 0.0) {
        const Mp f = Mp::exp_of(shift);
        for (auto& x : t.c) x *= f;
      }
      add_to(out_, t);
    }
    Value finish() { return std::move(out_); }

   private:
    Value out_;
  };
};

struct Horner {
  Mp p, dp, ddp;
};

// Value and first two derivatives of sum_k q[k] t^k.
Horner evaluate(const std::vector<Mp>& q, const Mp& t) {
  Horner h{q.back(), Mp(0.0), Mp(0.0)};
  for (int k = static_cast<int>(q.size()) - 2; k >= 0; --k) {
    h.ddp = h.ddp * t + h.dp;
    h.dp = h.dp * t + h.p;
    h.p = h.p * t + q[k];
  }
  h.ddp *= Mp(2.0);
  return h;
}

// Largest root by Laguerre iteration from the right of every root.
Mp laguerre_largest(const std::vector<Mp>& q) {
  const int d = static_cast<int>(q.size()) - 1;
  if (d == 1) return -(q[0] / q[1]);
  Mp x = -(q[d - 1] / q[d]);
  x = abs(x) * Mp(1.0 + 1e-6) + Mp(1.0);
  const Mp dd(static_cast<double>(d));
  const double eps = std::ldexp(1.0, -static_cast<int>(detail::working_precision()) + 8);
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 4000; ++it) {
    const Horner h = evaluate(q, x);
    if (h.p.is_zero()) break;
    const Mp G = h.dp / h.p;
    const Mp H = G * G - h.ddp / h.p;
    Mp disc = Mp(static_cast<double>(d - 1)) * (dd * H - G * G);
    if (disc.sign() < 0) {
      const double scale = (Mp(static_cast<double>(d - 1)) * (dd * abs(H) + G * G)).to_double();
      if (-disc.to_double() > 1e-6 * scale) throw LeeYangError("non-imaginary zero: complex root pair detected");
      disc = Mp(0.0);
    }
    Mp den = G.sign() >= 0 ? G + sqrt(disc) : G - sqrt(disc);
    if (den.is_zero()) break;
    const Mp a = dd / den;
    x -= a;
    const double step = std::fabs(a.to_double());
    const double size = std::max(std::fabs(x.to_double()), 1e-300);
    if (step <= eps * size) break;
    // A multiple root only converges linearly; stop once steps stop shrinking near it.
    if (step <= 1e-20 * size && step >= last_step) break;
    last_step = step;
  }
  return x;
}

// Polishes r against the undeflated polynomial; keeps r if Newton does not help.
Mp polish(const std::vector<Mp>& q, Mp r) {
  for (int it = 0; it < 8; ++it) {
    const Horner h = evaluate(q, r);
    if (h.p.is_zero() || h.dp.is_zero()) break;
    Mp next = r - h.p / h.dp;
    if (!(abs(evaluate(q, next).p) < abs(h.p))) break;
    r = std::move(next);
  }
  return r;
}

struct MpCoefficients {
  int N = 0;
  int zero_mult = 0;
  std::vector<Mp> c;  // c[m] = coefficient of s^m in P(s), top normalized to 1
};

MpCoefficients gauge_coefficients_mp(const CylinderGraph& g, const WeightAssignment& gw, const Region& region) {
  detail::LayeredInstance inst(g, gw, region, nullptr, 0.0);
  auto z = detail::run_layers<MpPolyRing>(inst)[0];
  MpCoefficients out;
  out.N = inst.present_vertices();
  if (z.c.empty() || z.lo + static_cast<int>(z.c.size()) - 1 != out.N) {
    throw std::invalid_argument("gauge polynomial is not monic (a disabled vertex weight?)");
  }
  int first = 0;
  while (z.c[first].is_zero()) ++first;
  out.zero_mult = z.lo + first;
  const int M = (out.N - out.zero_mult) / 2;
  const Mp top = z.c.back();
  out.c.resize(M + 1);
  for (int m = 0; m <= M; ++m) out.c[m] = z.c[first + 2 * m] / top;
  for (int k = first + 1; k < static_cast<int>(z.c.size()); k += 2) {
    if (!z.c[k].is_zero()) throw std::invalid_argument("parity violated in the gauge polynomial");
  }
  return out;
}

std::vector<double> roots_at_precision(const MpCoefficients& coefs, long bits) {
  detail::PrecisionScope scope(bits);
  const int M = static_cast<int>(coefs.c.size()) - 1;
  // Q(t) = P(-t) has the M roots t_i = lambda_i^2 > 0.
  std::vector<Mp> q(M + 1);
  for (int m = 0; m <= M; ++m) {
    q[m] = coefs.c[m];
    if (m % 2 == 1) q[m] = -q[m];
  }
  std::vector<Mp> work = q;
  std::vector<double> lambdas;
  lambdas.reserve(M);
  while (work.size() > 1) {
    Mp r = polish(q, laguerre_largest(work));
    // Synthetic division by (t - r).
    const int d = static_cast<int>(work.size()) - 1;
    std::vector<Mp> next(d);
    Mp carry = work[d];
    for (int k = d - 1; k >= 0; --k) {
      next[k] = carry;
      carry = work[k] + carry * r;
    }
    work = std::move(next);
    const double t = r.to_double();
    if (t < 0) {
      if (t < -1e-12) throw LeeYangError("non-imaginary zero: real part " + std::to_string(std::sqrt(-t)));
      lambdas.push_back(0.0);
    } else {
      lambdas.push_back(std::sqrt(t));
    }
  }
  std::sort(lambdas.begin(), lambdas.end());
  return lambdas;
}

// Parlett-Reinsch balancing (radix 2) in place.
void balance(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(a(j, i));
        r += std::fabs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

std::vector<double> LeeYangSpectrum::signed_atoms() const {
  std::vector<double> atoms;
  atoms.reserve(2 * lambdas.size() + zero_mult);
  for (auto it = lambdas.rbegin(); it != lambdas.rend(); ++it) atoms.push_back(-*it);
  atoms.insert(atoms.end(), zero_mult, 0.0);
  atoms.insert(atoms.end(), lambdas.begin(), lambdas.end());
  return atoms;
}

double LeeYangSpectrum::max_lambda() const { return lambdas.empty() ? 0.0 : lambdas.back(); }

EmpiricalMeasure empirical_measure(const LeeYangSpectrum& s) {
  return {s.signed_atoms(), static_cast<double>(s.n), static_cast<double>(s.N)};
}

MonomerPolynomial gauge_polynomial(const CylinderGraph& g, const WeightAssignment& w,
                                   const std::optional<Region>& region) {
  return partition_polynomial(g, gauge_transformed(g, w), CountingMask::all(g),
                              region ? *region : Region::whole(g));
}

LeeYangSpectrum spectrum(const MonomerPolynomial& p, int n_layers, double imaginary_tol) {
  if (p.mask_size != p.N) throw std::invalid_argument("spectrum needs the polynomial with every vertex counted");
  const int deg = p.degree();
  if (deg != p.N || std::fabs(p.log_coeffs[deg]) > 1e-9 * std::max(1, p.N)) {
    throw std::invalid_argument("spectrum needs the monic (gauge-transformed) polynomial");
  }
  LeeYangSpectrum out;
  out.N = p.N;
  out.n = n_layers;
  out.zero_mult = p.lowest();
  for (int j = out.zero_mult; j <= p.N; ++j) {
    if ((j - p.N) % 2 != 0 && p.log_coeffs[j] != kNegInf) {
      throw std::invalid_argument("parity violated: odd-offset coefficient is nonzero");
    }
  }
  const int M = (p.N - out.zero_mult) / 2;
  if (M == 0) return out;

  std::vector<double> lb(M + 1);
  for (int m = 0; m <= M; ++m) lb[m] = p.log_coeffs[out.zero_mult + 2 * m] - p.log_coeffs[p.N];
  // s = sigma u with sigma the geometric mean of the root magnitudes.
  const double log_sigma = lb[0] / M;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(M, M);
  for (int i = 1; i < M; ++i) C(i, i - 1) = 1.0;
  for (int m = 0; m < M; ++m) C(m, M - 1) = -std::exp(lb[m] + (m - M) * log_sigma);
  balance(C);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  if (es.info() != Eigen::Success) throw LeeYangError("companion eigensolve failed");
  const double sigma = std::exp(log_sigma);
  for (int k = 0; k < M; ++k) {
    const std::complex<double> s = es.eigenvalues()[k] * sigma;
    const std::complex<double> w = std::sqrt(s);
    if (std::fabs(w.real()) > imaginary_tol * (1.0 + std::abs(w))) {
      throw LeeYangError("non-imaginary zero: w = " + std::to_string(w.real()) + " + " +
                         std::to_string(w.imag()) + "i");
    }
    out.lambdas.push_back(std::fabs(w.imag()));
  }
  std::sort(out.lambdas.begin(), out.lambdas.end());
  return out;
}

LeeYangSpectrum spectrum_exact(const CylinderGraph& g, const WeightAssignment& w,
                               const std::optional<Region>& region, const ExactSpectrumOptions& opt) {
  const Region r = region ? *region : Region::whole(g);
  const WeightAssignment gw = gauge_transformed(g, w);
  const int N = r.vertex_count(g);
  long bits = opt.initial_bits > 0 ? opt.initial_bits : 128 + 2L * N;

  LeeYangSpectrum out;
  out.N = N;
  out.n = r.last_layer - r.first_layer + 1;
  std::vector<double> prev;
  for (;;) {
    MpCoefficients coefs;
    {
      detail::PrecisionScope scope(bits);
      coefs = gauge_coefficients_mp(g, gw, r);
    }
    out.zero_mult = coefs.zero_mult;
    std::vector<double> cur;
    try {
      cur = roots_at_precision(coefs, bits);
    } catch (const LeeYangError& e) {
      // Near-coincident roots can split into a complex pair after deflation at
      // too low a precision, so only the last attempt may report it.
      if (bits * 2 > opt.max_bits) throw;
      prev.clear();
      bits *= 2;
      continue;
    }
    if (!prev.empty() || cur.empty()) {
      bool agree = prev.size() == cur.size();
      for (std::size_t k = 0; agree && k < cur.size(); ++k)
        agree = std::fabs(cur[k] - prev[k]) <= opt.agreement * std::max(1.0, cur[k]);
      if (agree) {
        out.lambdas = std::move(cur);
        return out;
      }
    }
    if (bits * 2 > opt.max_bits) {
      throw LeeYangError("Lee-Yang roots did not stabilize below " + std::to_string(opt.max_bits) + " bits");
    }
    prev = std::move(cur);
    bits *= 2;
  }
}

double reconstruction_residual(const LeeYangSpectrum& s, const MonomerPolynomial& p) {
  const int M = static_cast<int>(s.lambdas.size());
  std::vector<double> e{0.0};
  for (double lam : s.lambdas) {
    const double lt = 2.0 * std::log(lam);
    std::vector<double> next(e.size() + 1, kNegInf);
    for (std::size_t k = 0; k < e.size(); ++k) {
      next[k] = log_add(next[k], e[k] + lt);
      next[k + 1] = log_add(next[k + 1], e[k]);
    }
    e = std::move(next);
  }
  const double top = p.log_coeffs[p.degree()];
  double worst = 0.0;
  for (int j = 0; j <= p.N; ++j) {
    const int off = j - s.zero_mult;
    const double want = p.log_coeffs[j] == kNegInf ? kNegInf : p.log_coeffs[j] - top;
    const double got = (off >= 0 && off % 2 == 0 && off / 2 <= M) ? e[off / 2] : kNegInf;
    if (want == kNegInf && got == kNegInf) continue;
    if (want == kNegInf || got == kNegInf) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::fabs(std::expm1(got - want)));
  }
  return worst;
}

bool verify_interlacing(const LeeYangSpectrum& parent, const LeeYangSpectrum& child, double slack) {
  if (child.N != parent.N - 1) {
    throw std::invalid_argument("interlacing needs a child of degree " + std::to_string(parent.N - 1) +
                                ", got " + std::to_string(child.N));
  }
  const auto p = parent.signed_atoms();
  const auto c = child.signed_atoms();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] < p[k] - slack || c[k] > p[k + 1] + slack) return false;
  }
  return true;
}

LocalizationResult localization_check(const CylinderGraph& g, const WeightAssignment& w,
                                      const LeeYangSpectrum& s) {
  LocalizationResult r;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    double half = 0.0;
    for (auto [u, e] : g.incident(v)) half += std::exp(0.5 * w.omega_tilde[e]);
    r.bound = std::max(r.bound, weighted_degree(g, w, v));
    r.tree_bound = std::max(r.tree_bound, half);
  }
  r.max_lambda = s.max_lambda();
  r.ok = r.max_lambda <= r.bound + 1e-9;
  r.tree_ok = r.max_lambda <= r.tree_bound + 1e-9;
  return r;
}

DensityFunctionals density_functionals(const LeeYangSpectrum& s, double x) {
  DensityFunctionals d;
  const double e = std::exp(-2.0 * x);
  for (double a : s.signed_atoms()) {
    const double q = a * a * e;
    d.u_n += 1.0 / (1.0 + q);
    d.varQ_n += 2.0 * q / ((1.0 + q) * (1.0 + q));
  }
  d.u_n /= s.n;
  d.varQ_n /= s.n;
  return d;
}

double transform_F(const LeeYangSpectrum& s, double z) {
  if (!(z > 0)) throw std::invalid_argument("transform_F needs z > 0");
  if (s.N == 0) return 0.0;
  double f = 0.0;
  for (double a : s.signed_atoms()) f += z / (z + a * a);
  return f / s.N;
}

}  // namespace dimerlab
