#include "dimerlab/kernels/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

namespace dimerlab::kernels {

namespace {

std::vector<Backend> detect_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (avx2::supported()) out.push_back(Backend::avx2);
  return out;
}

const std::vector<Backend>& backends() {
  static const std::vector<Backend> list = detect_backends();
  return list;
}

Backend initial_backend() {
  if (const char* env = std::getenv("DIMERLAB_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Backend::scalar;
  }
  return backends().back();
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

std::span<const Backend> available_backends() { return backends(); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2::supported()) b = Backend::scalar;
  current().store(b, std::memory_order_relaxed);
}

void log_accumulate(std::span<double> dst, std::span<const double> src, double shift) {
  const std::size_t n = std::min(dst.size(), src.size());
  if (active_backend() == Backend::avx2) {
    avx2::log_accumulate(dst.data(), src.data(), n, shift);
  } else {
    scalar::log_accumulate(dst.data(), src.data(), n, shift);
  }
}

double log_sum_exp(std::span<const double> v) {
  if (active_backend() == Backend::avx2) return avx2::log_sum_exp(v.data(), v.size());
  return scalar::log_sum_exp(v.data(), v.size());
}

std::array<double, 5> centered_power_sums(std::span<const double> logw, double log_norm,
                                          double offset, double center) {
  if (active_backend() == Backend::avx2) {
    return avx2::centered_power_sums(logw.data(), logw.size(), log_norm, offset, center);
  }
  return scalar::centered_power_sums(logw.data(), logw.size(), log_norm, offset, center);
}

}  // namespace dimerlab::kernels
