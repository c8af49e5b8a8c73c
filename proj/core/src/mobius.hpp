#pragma once

#include <complex>

namespace cat0lab::detail {

// Mobius translation of the unit disk sending `a` to the origin, and its inverse.
inline std::complex<double> to_origin(std::complex<double> a, std::complex<double> z) {
  return (z - a) / (1.0 - std::conj(a) * z);
}
inline std::complex<double> from_origin(std::complex<double> a, std::complex<double> w) {
  return (w + a) / (1.0 + std::conj(a) * w);
}

}  // namespace cat0lab::detail
