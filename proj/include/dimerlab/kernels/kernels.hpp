#pragma once

// Log-space inner loops of the transfer engine.
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2/FMA variant. The active backend is picked once at
// startup (DIMERLAB_SIMD=scalar forces the reference path) and can be
// overridden per thread-agnostic call through set_backend().

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace dimerlab::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

/// Backends usable on this CPU, scalar first.
std::span<const Backend> available_backends();

Backend active_backend();
void set_backend(Backend b);

/// dst[i] = log(exp(dst[i]) + exp(src[i] + shift)); -inf entries are empty terms.
void log_accumulate(std::span<double> dst, std::span<const double> src, double shift);

/// log(sum_i exp(v[i])); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

/// Power sums of the normalized weights p_j = exp(logw[j] - log_norm):
/// out[k] = sum_j p_j (j + offset - center)^k for k = 0..4.
std::array<double, 5> centered_power_sums(std::span<const double> logw, double log_norm,
                                          double offset, double center);

// Explicit-backend entry points, used by the equivalence tests.
namespace scalar {
void log_accumulate(double* dst, const double* src, std::size_t n, double shift);
double log_sum_exp(const double* v, std::size_t n);
std::array<double, 5> centered_power_sums(const double* logw, std::size_t n, double log_norm,
                                          double offset, double center);
}  // namespace scalar

namespace avx2 {
bool supported();
void log_accumulate(double* dst, const double* src, std::size_t n, double shift);
double log_sum_exp(const double* v, std::size_t n);
std::array<double, 5> centered_power_sums(const double* logw, std::size_t n, double log_norm,
                                          double offset, double center);
}  // namespace avx2

}  // namespace dimerlab::kernels
