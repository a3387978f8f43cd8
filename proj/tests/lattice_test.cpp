#include <gtest/gtest.h>

#include <random>

#include "enrinv/lattice.hpp"
#include "test_support.hpp"

using namespace enrinv;
using enrinv::testing::cofactor_det;
using enrinv::testing::random_unimodular;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

const Lattice& e8() {
  static const Lattice l = make_named("E8");
  return l;
}

/// Unit rows e_i for the given 1-based simple-root labels.
IntMat simple_roots(const std::vector<int>& labels) {
  IntMat b(labels.size(), 8);
  for (std::size_t i = 0; i < labels.size(); ++i) b(i, labels[i] - 1) = 1;
  return b;
}

const std::vector<Int> kHighestRoot = {2, 3, 4, 6, 5, 4, 3, 2};

bool isometric(const Lattice& a, const Lattice& b) { return is_isometric_definite(a, b).has_value(); }

/// Roots of E8 by brute force: every root is +-(nonnegative combination bounded by the highest root).
std::size_t brute_e8_roots() {
  const IntMat& g = e8().gram();
  std::size_t count = 0;
  std::vector<Int> x(8);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == 8) {
      Int n = 0;
      for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t b = 0; b < 8; ++b) n += x[a] * g(a, b) * x[b];
      if (n == -2) ++count;
      return;
    }
    for (Int c = 0; c <= kHighestRoot[i]; ++c) {
      x[i] = c;
      rec(i + 1);
    }
  };
  rec(0);
  return 2 * count;
}

}  // namespace

TEST(MakeNamed, ScaledHyperbolicPlane) { EXPECT_EQ(make_named("U(2)").gram(), (IntMat{{0, 2}, {2, 0}})); }

TEST(MakeNamed, A1IsNegative) { EXPECT_EQ(make_named("A1").gram(), (IntMat{{-2}})); }

TEST(MakeNamed, E8TimesTwo) {
  Lattice l = make_named("E8(2)");
  EXPECT_EQ(l.gram(), e8().gram().scaled(Int(2)));
  EXPECT_EQ(cofactor_det(l.gram()), 256);
  EXPECT_EQ(cofactor_det(e8().gram()), 1);
}

TEST(MakeNamed, SumsAndPowers) {
  Lattice l = make_named("U+U(2)+A1(2)^3");
  EXPECT_EQ(l.rank(), 7u);
  EXPECT_EQ(l.det(), -256);
  EXPECT_EQ(make_named("U \xE2\x8A\x95 E8").rank(), 10u);
  EXPECT_EQ(make_named("{0}").rank(), 0u);
  EXPECT_EQ(make_named("<-4>").gram(), (IntMat{{-4}}));
}

TEST(MakeNamed, UnknownNames) {
  EXPECT_EQ(kind_of([] { make_named("F4"); }), ErrorKind::UnknownName);
  EXPECT_EQ(kind_of([] { make_named("E9"); }), ErrorKind::UnknownName);
  EXPECT_EQ(kind_of([] { make_named("U+"); }), ErrorKind::UnknownName);
}

TEST(MakeNamed, DegenerateGramIsRejected) {
  EXPECT_EQ(kind_of([] { Lattice(IntMat{{2, 2}, {2, 2}}); }), ErrorKind::DegenerateForm);
}

TEST(DiscriminantGroup, UnimodularIsTrivial) { EXPECT_TRUE(discriminant_group(make_named("U")).orders.empty()); }

TEST(DiscriminantGroup, E8TwoIsElementary) {
  EXPECT_EQ(discriminant_group(make_named("E8(2)")).orders, std::vector<Int>(8, 2));
}

TEST(DiscriminantGroup, A1TwoIsCyclicOfOrderFour) {
  EXPECT_EQ(discriminant_group(make_named("A1(2)")).orders, std::vector<Int>{4});
}

TEST(DiscriminantGroup, OrderIsTheDeterminant) {
  for (const char* name : {"D4(2)", "E7(2)", "U+U(2)+D6(2)", "A1+A1(2)+<6>"}) {
    Lattice l = make_named(name);
    EXPECT_EQ(product(discriminant_group(l).orders), abs(cofactor_det(l.gram()))) << name;
  }
}

TEST(DiscriminantGroup, LiftsAreDualAndClassesRoundTrip) {
  Lattice l = make_named("D4(2)+A1(2)");
  DiscriminantGroup a = discriminant_group(l);
  for (std::size_t i = 0; i < a.orders.size(); ++i) {
    Elem e(a.orders.size());
    e[i] = 1;
    EXPECT_EQ(a.class_of(a.lift(e)), e);
  }
}

TEST(DiscriminantForm, ListOfDoubledRootLattices) {
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("A1(2)")), standard_form("<-1/4>")));
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("D4(2)")), parse_form_label("v+v(4)")));
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("D6(2)")), parse_form_label("u2+<1/4>^2")));
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("E7(2)")), parse_form_label("u3+<1/4>")));
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("E8(2)")), parse_form_label("u4")));
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("U(2)")), standard_form("u")));
  EXPECT_TRUE(is_isomorphic(discriminant_form(make_named("D4")), standard_form("v")));
}

TEST(DiscriminantForm, OddLatticeIsRejected) {
  EXPECT_EQ(kind_of([] { discriminant_form(make_named("<3>")); }), ErrorKind::OddLattice);
}

TEST(TwoElementary, Invariants) {
  EXPECT_EQ(two_elementary_invariants(make_named("A1")), (TwoElemInvariants{1, 1, 1}));
  EXPECT_EQ(two_elementary_invariants(make_named("D4")), (TwoElemInvariants{4, 2, 0}));
  EXPECT_EQ(two_elementary_invariants(make_named("U(2)")), (TwoElemInvariants{2, 2, 0}));
  EXPECT_EQ(two_elementary_invariants(make_named("U(2)+A1^8")), (TwoElemInvariants{10, 10, 1}));
  EXPECT_EQ(two_elementary_invariants(make_named("U+U(2)+E8(2)")).str(), "(12,10,0)");
}

TEST(TwoElementary, NonElementaryIsRejected) {
  EXPECT_EQ(kind_of([] { two_elementary_invariants(make_named("A2")); }), ErrorKind::NotTwoElementary);
}

TEST(Complement, RootInE8GivesE7) {
  Sublattice c = orthogonal_complement(Sublattice(e8(), simple_roots({8})));
  EXPECT_EQ(c.rank(), 7u);
  EXPECT_TRUE(isometric(c.lattice(), make_named("E7")));
}

TEST(Complement, D4InE8GivesD4) {
  Sublattice d4(e8(), simple_roots({2, 3, 4, 5}));
  EXPECT_TRUE(isometric(d4.lattice(), make_named("D4")));
  Sublattice c = orthogonal_complement(d4);
  EXPECT_TRUE(isometric(c.lattice(), make_named("D4")));
}

TEST(Complement, WholeLatticeHasZeroComplement) {
  EXPECT_EQ(orthogonal_complement(Sublattice(e8(), IntMat::identity(8))).rank(), 0u);
}

TEST(Closure, A1PlusE7SaturatesToE8) {
  IntMat b = vstack(IntMat::from_rows({kHighestRoot}, 8), simple_roots({1, 2, 3, 4, 5, 6, 7}));
  Sublattice s(e8(), b);
  EXPECT_EQ(cofactor_det(s.gram()), 4);
  Sublattice c = primitive_closure(s);
  EXPECT_EQ(cofactor_det(c.gram()), 1);
  EXPECT_EQ(primitive_closure(c).basis, c.basis);
}

TEST(Closure, PrimitiveIsUnchangedAndContentIsRemoved) {
  Sublattice p(e8(), simple_roots({3}));
  EXPECT_EQ(primitive_closure(p).basis, p.basis);
  Sublattice twice(make_named("A1"), IntMat{{2}});
  EXPECT_EQ(primitive_closure(twice).basis, (IntMat{{1}}));
}

TEST(Glue, A1AndE7) {
  Sublattice a1(e8(), IntMat::from_rows({kHighestRoot}, 8));
  Sublattice e7(e8(), simple_roots({1, 2, 3, 4, 5, 6, 7}));
  GlueGroup g = glue_group(a1, e7);
  EXPECT_EQ(subgroup_order(g.orders, g.gamma), 2);
  EXPECT_EQ(subgroup_order(g.as.orders, g.proj_s), 2);
  EXPECT_EQ(subgroup_order(g.at.orders, g.proj_t), 2);
}

TEST(Glue, E8AndZero) {
  GlueGroup g = glue_group(Sublattice(e8(), IntMat::identity(8)), Sublattice(e8(), IntMat(0, 8)));
  EXPECT_EQ(subgroup_order(g.orders, g.gamma), 1);
}

TEST(Glue, D4AndD4) {
  Sublattice d4(e8(), simple_roots({2, 3, 4, 5}));
  Sublattice c = orthogonal_complement(d4);
  GlueGroup g = glue_group(d4, c);
  // |Gamma|^2 = det(D4 + D4) / det(E8) = 16
  EXPECT_EQ(subgroup_order(g.orders, g.gamma), 4);
}

TEST(Glue, NonOrthogonalIsRejected) {
  EXPECT_EQ(kind_of([] { glue_group(Sublattice(e8(), simple_roots({1})), Sublattice(e8(), simple_roots({3}))); }),
            ErrorKind::NotOrthogonal);
}

TEST(Overlattice, A1PlusE7GluesToE8) {
  Lattice m = make_named("A1+E7");
  DiscriminantGroup a = discriminant_group(m);
  ASSERT_EQ(a.orders, (std::vector<Int>{2, 2}));
  FQF q = discriminant_form(a);
  // the only nonzero isotropic element is the diagonal one
  std::vector<Elem> iso;
  for_each_element(q.orders(), [&](const Elem& x) {
    if (!is_zero(x) && q.q_scaled(x) == 0) iso.push_back(x);
  });
  ASSERT_EQ(iso.size(), 1u);
  Overlattice n = overlattice_from_glue(a, Subgroup{{iso[0]}});
  EXPECT_EQ(cofactor_det(n.lattice.gram()), 1);
  EXPECT_TRUE(n.lattice.is_even());
  EXPECT_TRUE(isometric(n.lattice, e8()));
}

TEST(Overlattice, TrivialGlueKeepsTheLattice) {
  Lattice m = make_named("D4(2)");
  Overlattice n = overlattice_from_glue(m, Subgroup{});
  EXPECT_EQ(n.lattice.det(), m.det());
}

TEST(Overlattice, NonIsotropicGlueIsRejected) {
  Lattice m = make_named("A1+A1");
  EXPECT_EQ(kind_of([&] { overlattice_from_glue(m, Subgroup{{{1, 0}}}); }), ErrorKind::NotIsotropic);
}

TEST(ShortVectors, E8TwoHasNoRoots) { EXPECT_TRUE(short_vectors(make_named("E8(2)"), Int(-2)).empty()); }

TEST(ShortVectors, E8HasTwoHundredFortyRoots) {
  auto roots = short_vectors(e8(), Int(-2));
  EXPECT_EQ(2 * roots.size(), brute_e8_roots());
  EXPECT_EQ(roots.size(), 120u);
  for (const auto& r : roots) EXPECT_EQ(e8().inner(r, r), -2);
}

TEST(ShortVectors, A1TwoNormMinusFour) {
  auto v = short_vectors(make_named("A1(2)"), Int(-4));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], std::vector<Int>{1});
}

TEST(ShortVectors, CountsOfRootSystems) {
  EXPECT_EQ(short_vector_counts(make_named("A1+E7"), Int(2))[2], 64u);
  EXPECT_EQ(short_vector_counts(make_named("D8"), Int(2))[2], 56u);
  EXPECT_EQ(short_vector_counts(make_named("E7"), Int(2))[2], 63u);
}

TEST(ShortVectors, IndefiniteIsRejected) {
  EXPECT_EQ(kind_of([] { short_vectors(make_named("U"), Int(2)); }), ErrorKind::IndefiniteLattice);
}

TEST(DefiniteIsometry, PermutedE8Two) {
  Lattice a = make_named("E8(2)");
  IntMat p(8, 8);
  for (std::size_t i = 0; i < 8; ++i) p(i, (i + 3) % 8) = 1;
  Lattice b(p.transpose() * a.gram() * p);
  auto g = is_isometric_definite(a, b);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->transpose() * b.gram() * *g, a.gram());
}

TEST(DefiniteIsometry, RandomBasisChangeOfD4) {
  std::mt19937 rng(23);
  Lattice a = make_named("D4+A1");
  for (int t = 0; t < 5; ++t) {
    IntMat p = random_unimodular(5, rng);
    Lattice b(p.transpose() * a.gram() * p);
    auto g = is_isometric_definite(a, b);
    ASSERT_TRUE(g);
    EXPECT_EQ(g->transpose() * b.gram() * *g, a.gram());
  }
}

TEST(DefiniteIsometry, Negatives) {
  EXPECT_FALSE(is_isometric_definite(make_named("D4"), make_named("A1^4")));
  // same determinant 4, root counts 64 vs 56 up to sign
  EXPECT_FALSE(is_isometric_definite(make_named("A1+E7"), make_named("D8")));
  EXPECT_FALSE(is_isometric_definite(make_named("D4"), make_named("D4").scaled(Int(-1))));
}

TEST(DefiniteIsometry, OutOfRangeIsAResourceLimit) {
  EXPECT_EQ(kind_of([] { is_isometric_definite(make_named("A1^9"), make_named("A1^9")); }), ErrorKind::ResourceLimit);
}

TEST(Involution, MinusIdentityOnE8) {
  InvolutionData inv(e8(), IntMat::identity(8).scaled(Int(-1)));
  Eigenlattices e = involution_eigenlattices(inv);
  EXPECT_EQ(e.fixed.rank(), 0u);
  EXPECT_EQ(e.anti.rank(), 8u);
}

TEST(Involution, SwapOnE8PlusE8) {
  Lattice l = make_named("E8+E8");
  IntMat g(16, 16);
  for (std::size_t i = 0; i < 8; ++i) g(i, i + 8) = g(i + 8, i) = 1;
  Eigenlattices e = involution_eigenlattices(InvolutionData(l, g));
  EXPECT_TRUE(isometric(e.fixed.lattice(), make_named("E8(2)")));
  EXPECT_TRUE(isometric(e.anti.lattice(), make_named("E8(2)")));
}

TEST(Involution, FromA1InE8) {
  InvolutionData inv = involution_from_orthogonal_pair(e8(), Sublattice(e8(), simple_roots({8})));
  Eigenlattices e = involution_eigenlattices(inv);
  EXPECT_TRUE(isometric(e.fixed.lattice(), make_named("A1")));
  EXPECT_TRUE(isometric(e.anti.lattice(), make_named("E7")));
}

TEST(Involution, FromD4InE8) {
  InvolutionData inv = involution_from_orthogonal_pair(e8(), Sublattice(e8(), simple_roots({2, 3, 4, 5})));
  Eigenlattices e = involution_eigenlattices(inv);
  EXPECT_TRUE(isometric(e.fixed.lattice(), make_named("D4")));
  EXPECT_TRUE(isometric(e.anti.lattice(), make_named("D4")));
}

TEST(Involution, WholeLatticeGivesIdentity) {
  InvolutionData inv = involution_from_orthogonal_pair(e8(), Sublattice(e8(), IntMat::identity(8)));
  EXPECT_EQ(inv.matrix, IntMat::identity(8));
}

TEST(Involution, NonTwoElementaryPairDoesNotExtend) {
  // A2 inside E8 has complement E6 and 3-torsion glue
  EXPECT_EQ(kind_of([] { involution_from_orthogonal_pair(e8(), Sublattice(e8(), simple_roots({1, 3}))); }),
            ErrorKind::NotExtendable);
}

TEST(Involution, InvalidMatrixIsRejected) {
  EXPECT_EQ(kind_of([] { InvolutionData(make_named("U"), IntMat{{1, 1}, {0, 1}}); }), ErrorKind::InvalidArgument);
}
