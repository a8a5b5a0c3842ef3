#include <jqn/ring.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace jqn;
using jqn::testing::Rng;

namespace {

Poly x() { return Poly::var("x"); }
Poly y() { return Poly::var("y"); }
Poly u(int k = 1) { return Poly::exp_t(k); }

}  // namespace

TEST(Ring, Arithmetic) {
  EXPECT_EQ((x() + 1) * (x() - 1), x() * x() - 1);
  EXPECT_EQ(u() * u(-1), Poly(1));
  Poly p = x() * y() + Rat(1, 2);
  EXPECT_EQ(p + Poly(), p);
  EXPECT_TRUE((p - p).is_zero());
}

TEST(Ring, RationalsAreCanonical) {
  Poly p(Rat(6, 4));
  EXPECT_EQ(p.constant_value(), Rat(3, 2));
  EXPECT_EQ(p.constant_value().get_den(), 2);
  EXPECT_TRUE((Poly(Rat(2, 3)) * Poly(Rat(-3, 2)) + 1).is_zero());
}

TEST(Ring, Partial) {
  EXPECT_EQ(partial(x() * x() * u(), "x"), 2 * x() * u());
  EXPECT_EQ(partial(u(-1), kTime), -u(-1));
  EXPECT_TRUE(partial(x(), kTime).is_zero());
  Poly t = Poly::var(kTime);
  EXPECT_EQ(partial(t * t * u(2), kTime), 2 * t * u(2) + 2 * t * t * u(2));
}

TEST(Ring, Substitute) {
  EXPECT_EQ(substitute(x() * x() + y(), {{"y", Poly(0)}}), x() * x());
  EXPECT_EQ(substitute(y(), {{"y", x() * x()}}), x() * x());
  EXPECT_EQ(substitute(x() * u(), {{"x", Poly(2)}}), 2 * u());
  // simultaneous, not sequential
  EXPECT_EQ(substitute(x() + 2 * y(), {{"x", y()}, {"y", x()}}), y() + 2 * x());
  EXPECT_THROW(substitute(u(), {{kTime, x()}}), RingError);
}

TEST(Ring, PrintingIsDeterministic) {
  Poly p = 3 * x() * x() * y() - x() + Rat(1, 2) + u(-1) * y();
  EXPECT_EQ(p.str(), (Rat(1, 2) + u(-1) * y() - x() + 3 * y() * x() * x()).str());
  EXPECT_EQ(Poly().str(), "0");
}

TEST(RingProperty, RingAxioms) {
  Rng rng(11);
  std::vector<std::string> vars{"x", "y"};
  for (int trial = 0; trial < 200; ++trial) {
    Poly a = rng.poly(vars, 2, 3, true), b = rng.poly(vars, 2, 3, true), c = rng.poly(vars, 2, 3, true);
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ(a + b, b + a);
    ASSERT_TRUE((a - a).is_zero());
  }
}

TEST(RingProperty, PartialIsDerivation) {
  Rng rng(12);
  std::vector<std::string> vars{"x", "y", kTime};
  for (int trial = 0; trial < 200; ++trial) {
    Poly a = rng.poly(vars, 2, 3, true), b = rng.poly(vars, 2, 3, true);
    for (const char* v : {"x", "y", kTime}) ASSERT_EQ(partial(a * b, v), partial(a, v) * b + a * partial(b, v));
  }
}

TEST(RingProperty, ZeroTestAgreesWithEvaluation) {
  Rng rng(13);
  std::vector<std::string> vars{"x", "y"};
  for (int trial = 0; trial < 100; ++trial) {
    Poly a = rng.poly(vars, 2, 3, true), b = rng.poly(vars, 2, 3, true);
    Poly d = (a + b) * (a - b) - (a * a - b * b);
    bool all_vanish = true;
    for (int k = 0; k < 5; ++k) {
      std::map<std::string, Rat> pt{{"x", Rat(k + 1, 3)}, {"y", Rat(2 * k - 3, 5)}};
      if (evaluate(d, pt, Rat(k + 2, 7)) != 0) all_vanish = false;
    }
    ASSERT_TRUE(d.is_zero());
    ASSERT_TRUE(all_vanish);
    if (!a.is_zero()) {
      bool some_nonzero = false;
      for (int k = 0; k < 5; ++k) {
        std::map<std::string, Rat> pt{{"x", Rat(k + 1, 3)}, {"y", Rat(2 * k - 3, 5)}};
        if (evaluate(a, pt, Rat(k + 2, 7)) != 0) some_nonzero = true;
      }
      ASSERT_TRUE(some_nonzero) << a.str();
    }
  }
}

TEST(Ring, PolyMapPull) {
  PolyMap psi{{"x"}, {"y"}, {x() * x()}};
  psi.validate();
  EXPECT_EQ(psi.pull(y()), x() * x());
  EXPECT_TRUE(PolyMap::identity({"x", "y"}).is_identity());
}
