#pragma once

// JSON and CSV renderings shared by the CLI and the experiment harness.

#include <string>
#include <vector>

#include "json.hpp"
#include "dimerlab/graph.hpp"
#include "dimerlab/leeyang.hpp"
#include "dimerlab/polynomial.hpp"
#include "dimerlab/weights.hpp"

namespace dimerlab::io {

/// Shortest round-trip decimal form; "-inf", "inf" and "nan" spelled out.
std::string format_double(double v);

/// -inf becomes null.
nlohmann::json log_value(double v);
double parse_log_value(const nlohmann::json& j);

/// {n, h, h_edges, nu, omega, seed, stream}; arrays in canonical order.
nlohmann::json weights_to_json(const CylinderGraph& g, const WeightAssignment& w);
/// Rebuilds graph and weights; the arrays round-trip bit-exactly.
std::pair<CylinderGraph, WeightAssignment> weights_from_json(const nlohmann::json& j);

/// {N, mask_size, log_coeffs}.
nlohmann::json polynomial_to_json(const MonomerPolynomial& p);
MonomerPolynomial polynomial_from_json(const nlohmann::json& j);

/// {N, zero_mult, lambdas}.
nlohmann::json spectrum_to_json(const LeeYangSpectrum& s);

std::string sha256_hex(const std::string& data);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace dimerlab::io
