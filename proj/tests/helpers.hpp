#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "qrngq/error.hpp"

#define CHECK_ERROR_CODE(expr, expected)            \
  do {                                              \
    bool thrown_ = false;                           \
    try {                                           \
      (void)(expr);                                 \
    } catch (const qrngq::Error& e_) {              \
      thrown_ = true;                               \
      CHECK(e_.code() == (expected));               \
    }                                               \
    CHECK_MESSAGE(thrown_, "expected qrngq::Error"); \
  } while (0)

namespace testutil {

// Inverse-CDF arcsine draw on [0, 1].
inline double arcsine_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s = std::sin(0.5 * 3.14159265358979323846 * u(rng));
  return s * s;
}

}  // namespace testutil
