#pragma once
// Scalar types shared by the finite-dimensional solvers. Sequential probe
// sweeps amplify rounding error exponentially in the parallelogram size, so
// the reconstruction path runs in IEEE binary128 through Boost.Multiprecision.
#include <boost/multiprecision/float128.hpp>
#include <Eigen/Core>
#include <Eigen/Dense>
#include <complex>
#include <string>

namespace latinv {
using quad = boost::multiprecision::float128;
using cplx = std::complex<double>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline double to_double(double x) { return x; }
inline double to_double(const quad& x) { return static_cast<double>(x); }

template <class S>
S scalar_abs(const S& x) {
  using std::abs;
  using boost::multiprecision::abs;
  return abs(x);
}

// Decimal digits needed to round-trip a value of type S through text.
template <class S>
constexpr int round_trip_digits() {
  return std::is_same_v<S, double> ? 17 : 36;
}

template <class S>
std::string to_text(const S& x) {
  if constexpr (std::is_same_v<S, double>) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  } else {
    return x.str(round_trip_digits<S>(), std::ios_base::scientific);
  }
}

template <class S>
S from_text(const std::string& s) {
  if constexpr (std::is_same_v<S, double>) {
    return std::stod(s);
  } else {
    return S(s);
  }
}
}  // namespace latinv

namespace Eigen {
template <>
struct NumTraits<boost::multiprecision::float128>
    : GenericNumTraits<boost::multiprecision::float128> {
  using Real = boost::multiprecision::float128;
  using NonInteger = Real;
  using Nested = Real;
  using Literal = Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return Real(1e-28); }
  static Real highest() { return std::numeric_limits<Real>::max(); }
  static Real lowest() { return -std::numeric_limits<Real>::max(); }
  static int digits10() { return 33; }
};
}  // namespace Eigen
