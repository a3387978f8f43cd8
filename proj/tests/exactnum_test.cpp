#include <gtest/gtest.h>

#include <random>

#include "enrinv/exactnum.hpp"
#include "enrinv/lattice.hpp"
#include "test_support.hpp"

using namespace enrinv;
using enrinv::testing::cofactor_det;
using enrinv::testing::random_unimodular;

namespace {

using Sig = std::pair<std::size_t, std::size_t>;

bool is_diagonal_chain(const IntMat& d) {
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (i != j && d(i, j) != 0) return false;
  std::size_t k = std::min(d.rows(), d.cols());
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (d(i, i) < 0) return false;
    if (d(i, i) == 0) {
      if (d(i + 1, i + 1) != 0) return false;
    } else if (d(i + 1, i + 1) % d(i, i) != 0) {
      return false;
    }
  }
  return true;
}

void expect_smith(const IntMat& m) {
  SmithForm s = smith_normal_form(m);
  EXPECT_EQ(s.U * m * s.V, s.D);
  EXPECT_TRUE(is_diagonal_chain(s.D));
  EXPECT_EQ(abs(determinant(s.U)), 1);
  EXPECT_EQ(abs(determinant(s.V)), 1);
}

}  // namespace

TEST(SmithNormalForm, AlreadyDiagonal) {
  IntMat m{{2, 0}, {0, 4}};
  SmithForm s = smith_normal_form(m);
  EXPECT_EQ(s.D, m);
  EXPECT_EQ(s.U, IntMat::identity(2));
  EXPECT_EQ(s.V, IntMat::identity(2));
}

TEST(SmithNormalForm, ScaledHyperbolicPlane) {
  IntMat m{{0, 2}, {2, 0}};
  SmithForm s = smith_normal_form(m);
  EXPECT_EQ(s.D, (IntMat{{2, 0}, {0, 2}}));
  expect_smith(m);
}

TEST(SmithNormalForm, E8IsUnimodular) {
  IntMat e8 = make_named("E8").gram();
  EXPECT_EQ(cofactor_det(e8), 1);
  SmithForm s = smith_normal_form(e8);
  EXPECT_EQ(s.D, IntMat::identity(8));
  expect_smith(e8);
}

TEST(SmithNormalForm, RandomMatricesSatisfyTheIdentity) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> val(-6, 6), dim(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    IntMat m(dim(rng), dim(rng));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = val(rng);
    expect_smith(m);
  }
}

TEST(Determinant, MatchesCofactorExpansion) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> val(-9, 9), dim(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = dim(rng);
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = val(rng);
    EXPECT_EQ(determinant(m), cofactor_det(m));
  }
}

TEST(Signature, HyperbolicPlane) { EXPECT_EQ(signature(make_named("U").gram()), Sig(1, 1)); }

TEST(Signature, E8IsNegativeDefinite) {
  EXPECT_EQ(signature(make_named("E8").gram()), Sig(0, 8));
}

TEST(Signature, BlockSum) {
  EXPECT_EQ(signature(make_named("U+U(2)+E8(2)").gram()), Sig(2, 10));
}

TEST(Signature, AllZeroDiagonalNeedsTheOffDiagonalMove) {
  IntMat g{{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 3}, {0, 0, 3, 0}};
  EXPECT_EQ(signature(g), Sig(2, 2));
}

TEST(Signature, DegenerateIsRejected) {
  IntMat g{{1, 1}, {1, 1}};
  try {
    signature(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateForm);
  }
}

TEST(Signature, InvariantUnderUnimodularCongruence) {
  std::mt19937 rng(3);
  const std::vector<std::string> names = {"U", "U+U(2)+E8(2)", "D4+A1", "E7+U(2)", "<3>+<-5>+U"};
  for (const auto& name : names) {
    IntMat g = make_named(name).gram();
    auto sig = signature(g);
    for (int t = 0; t < 20; ++t) {
      IntMat p = random_unimodular(g.rows(), rng);
      EXPECT_EQ(signature(p.transpose() * g * p), sig) << name;
    }
  }
}

TEST(Saturate, DividesOutContent) {
  EXPECT_EQ(saturate(IntMat{{2, 0}}, 2), (IntMat{{1, 0}}));
}

TEST(Saturate, RootOfE8PlusItsComplementHasIndexTwo) {
  // highest root of E8 in simple-root coordinates, and the seven roots orthogonal to it
  IntMat b{{2, 3, 4, 6, 5, 4, 3, 2},
           {1, 0, 0, 0, 0, 0, 0, 0},
           {0, 1, 0, 0, 0, 0, 0, 0},
           {0, 0, 1, 0, 0, 0, 0, 0},
           {0, 0, 0, 1, 0, 0, 0, 0},
           {0, 0, 0, 0, 1, 0, 0, 0},
           {0, 0, 0, 0, 0, 1, 0, 0},
           {0, 0, 0, 0, 0, 0, 1, 0}};
  IntMat g = make_named("E8").gram();
  EXPECT_EQ(cofactor_det(b * g * b.transpose()), 4);
  IntMat s = saturate(b, 8);
  EXPECT_EQ(cofactor_det(s * g * s.transpose()), 1);
  EXPECT_EQ(abs(cofactor_det(s)), 1);
}

TEST(Saturate, IdempotentOnPrimitiveBases) {
  IntMat b{{1, 2, 3}, {0, 1, 4}};
  IntMat s = saturate(b, 3);
  EXPECT_EQ(saturate(s, 3), s);
  EXPECT_EQ(hermite_normal_form(b), s);
}

TEST(Saturate, DependentRowsAreRejected) {
  try {
    saturate(IntMat{{1, 2}, {2, 4}}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DependentRows);
  }
}

TEST(Saturate, GramDeterminantDropsByASquare) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> val(-4, 4);
  IntMat g = make_named("E8").gram();
  for (int t = 0; t < 30; ++t) {
    IntMat b(3, 8);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 8; ++j) b(i, j) = val(rng);
    if (rank(b) < 3) continue;
    IntMat s = saturate(b, 8);
    EXPECT_EQ(saturate(s, 8), s);
    Int d0 = cofactor_det(b * g * b.transpose()), d1 = cofactor_det(s * g * s.transpose());
    ASSERT_NE(d1, 0);
    EXPECT_EQ(d0 % d1, 0);
    Int ratio = d0 / d1;
    Int root = boost::multiprecision::sqrt(ratio);
    EXPECT_EQ(root * root, ratio);
  }
}

TEST(KernelBasis, IdentityHasTrivialKernel) { EXPECT_EQ(kernel_basis(IntMat::identity(3)).rows(), 0u); }

TEST(KernelBasis, ZeroMatrixHasFullKernel) {
  IntMat k = kernel_basis(IntMat(3, 3));
  EXPECT_EQ(k, IntMat::identity(3));
}

TEST(KernelBasis, SwapMinusIdentity) {
  IntMat g{{0, 1}, {1, 0}};
  EXPECT_EQ(kernel_basis(g - IntMat::identity(2)), (IntMat{{1, 1}}));
}

TEST(KernelBasis, RandomKernelsAreSaturatedAndAnnihilate) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> val(-3, 3);
  for (int t = 0; t < 100; ++t) {
    IntMat m(5, 2);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 2; ++j) m(i, j) = val(rng);
    IntMat k = kernel_basis(m);
    EXPECT_EQ(k.rows(), 5 - rank(m));
    EXPECT_TRUE((k * m).is_zero());
    if (k.rows() > 0) {
      EXPECT_EQ(saturate(k, 5), k);
    }
  }
}

TEST(Inverse, RoundTrip) {
  IntMat m{{2, 1}, {7, 4}};
  EXPECT_EQ(to_rat(m) * inverse(m), RatMat::identity(2));
}
