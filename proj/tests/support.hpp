#ifndef NULLDIST_TESTS_SUPPORT_HPP
#define NULLDIST_TESTS_SUPPORT_HPP

#include <gtest/gtest.h>

#include <cmath>

#include "nulldist/types.hpp"

#define EXPECT_ERRC(stmt, errc)                                   \
  do {                                                            \
    try {                                                         \
      stmt;                                                       \
      ADD_FAILURE() << "expected " << nulldist::errc_name(errc);  \
    } catch (const nulldist::Error& e) {                          \
      EXPECT_EQ(e.code(), errc) << e.what();                      \
    }                                                             \
  } while (0)

namespace testing_support {

// Box [anchor - below, anchor + above] snapped outward to multiples of h.
inline nulldist::Box aligned(const nulldist::Vector& anchor, const nulldist::Vector& below,
                             const nulldist::Vector& above, double h) {
  nulldist::Box b{anchor, anchor};
  for (int k = 0; k < anchor.size(); ++k) {
    b.lo[k] = anchor[k] - std::ceil(below[k] / h - 1e-9) * h;
    b.hi[k] = anchor[k] + std::ceil(above[k] / h - 1e-9) * h;
  }
  return b;
}

inline nulldist::Box cube(const nulldist::Vector& lo, const nulldist::Vector& hi) {
  return nulldist::Box{lo, hi};
}

}  // namespace testing_support

#endif  // NULLDIST_TESTS_SUPPORT_HPP
