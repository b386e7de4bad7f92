#include "dimerlab/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dimerlab/logspace.hpp"

namespace dimerlab::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json log_value(double v) {
  if (v == kNegInf) return nullptr;
  return v;
}

double parse_log_value(const nlohmann::json& j) { return j.is_null() ? kNegInf : j.get<double>(); }

nlohmann::json weights_to_json(const CylinderGraph& g, const WeightAssignment& w) {
  nlohmann::json j;
  j["n"] = g.layers();
  j["h"] = g.fiber_size();
  j["h_edges"] = g.fiber().edges();
  nlohmann::json nu = nlohmann::json::array(), omega = nlohmann::json::array();
  for (double v : w.nu) nu.push_back(log_value(v));
  for (double v : w.omega) omega.push_back(log_value(v));
  j["nu"] = nu;
  j["omega"] = omega;
  j["seed"] = w.seed.seed;
  j["stream"] = w.seed.stream;
  return j;
}

std::pair<CylinderGraph, WeightAssignment> weights_from_json(const nlohmann::json& j) {
  const auto edges = j.at("h_edges").get<std::vector<std::pair<int, int>>>();
  CylinderGraph g = build_cylinder(j.at("n").get<int>(), HGraph(j.at("h").get<int>(), edges));
  std::vector<double> nu, omega;
  for (const auto& v : j.at("nu")) nu.push_back(parse_log_value(v));
  for (const auto& v : j.at("omega")) omega.push_back(parse_log_value(v));
  if (static_cast<int>(nu.size()) != g.vertex_count() || static_cast<int>(omega.size()) != g.edge_count()) {
    throw std::invalid_argument("weight arrays do not match the graph size");
  }
  RngSeed seed{j.value("seed", std::uint64_t{0}), j.value("stream", std::uint64_t{0})};
  auto w = make_weights(g, std::move(nu), std::move(omega), seed);
  return {std::move(g), std::move(w)};
}

nlohmann::json polynomial_to_json(const MonomerPolynomial& p) {
  nlohmann::json c = nlohmann::json::array();
  for (double v : p.log_coeffs) c.push_back(log_value(v));
  return {{"N", p.N}, {"mask_size", p.mask_size}, {"log_coeffs", c}};
}

MonomerPolynomial polynomial_from_json(const nlohmann::json& j) {
  MonomerPolynomial p;
  p.N = j.at("N").get<int>();
  p.mask_size = j.at("mask_size").get<int>();
  for (const auto& v : j.at("log_coeffs")) p.log_coeffs.push_back(parse_log_value(v));
  return p;
}

nlohmann::json spectrum_to_json(const LeeYangSpectrum& s) {
  return {{"N", s.N}, {"zero_mult", s.zero_mult}, {"lambdas", s.lambdas}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 15]);
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << contents;
  if (!f) throw std::runtime_error("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace dimerlab::io
