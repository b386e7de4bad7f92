#include "dimerlab/version.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <mpfr.h>
#include <openssl/crypto.h>
#include <string>

#include "dimerlab/kernels/kernels.hpp"

namespace dimerlab {

nlohmann::json build_info() {
  return {{"dimerlab", kVersion},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"mpfr", mpfr_get_version()},
          {"gmp", gmp_version},
          {"openssl", OpenSSL_version(OPENSSL_VERSION)},
          {"simd_backend", std::string(kernels::backend_name(kernels::active_backend()))}};
}

}  // namespace dimerlab
