#include <gtest/gtest.h>

#include "enrinv/nikulin.hpp"

using namespace enrinv;

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

bool matches(const FQF& q, const std::string& label) {
  FQF r = parse_form_label(label);
  return q.order() == r.order() && is_isomorphic(q, r).has_value();
}

const std::vector<ConditionSplit>& pairs() {
  static const std::vector<ConditionSplit> p = enumerate_pairs();
  return p;
}

const ConditionSplit& split_named(const std::string& plus) {
  for (const auto& sp : pairs())
    if (sp.name_plus == plus) return sp;
  throw std::runtime_error("no split " + plus);
}

const HClass& h_labelled(const std::vector<HClass>& hs, const std::string& label) {
  for (const auto& h : hs)
    if (matches(h.form, label)) return h;
  throw std::runtime_error("no H class " + label);
}

std::vector<std::string> labels_of(const std::vector<HClass>& hs) {
  std::vector<std::string> out;
  for (const auto& h : hs) out.push_back(h.label);
  return out;
}

}  // namespace

TEST(Split, MinusIdentityHasNoFixedPart) {
  const Lattice e8x2 = make_named("E8(2)");
  ConditionSplit sp = split_condition(InvolutionData(e8x2, IntMat::identity(8).scaled(Int(-1))));
  EXPECT_EQ(sp.s_plus.rank(), 0u);
  EXPECT_EQ(sp.s_minus.rank(), 8u);
  EXPECT_EQ(subgroup_order(sp.a_minus.orders, sp.gamma_minus), 1);
}

TEST(Split, GlueGroupSizes) {
  // |Gamma| = |2 A_{S+}| = prod o / gcd(o, 2) over the cyclic orders of A_{S+}.
  for (const auto& sp : pairs()) {
    Int expected = 1;
    for (const auto& o : sp.a_plus.orders) expected *= o % 2 == 0 ? o / 2 : o;
    EXPECT_EQ(subgroup_order(sp.a_plus.orders, sp.gamma_plus), expected) << sp.name_plus;
    EXPECT_EQ(subgroup_order(sp.a_minus.orders, sp.gamma_minus), expected) << sp.name_plus;
  }
  EXPECT_TRUE(matches(restrict_form(split_named("D4").q_minus, split_named("D4").gamma_minus), "z2"));
}

TEST(Split, RejectsNonDoubledLattice) {
  const Lattice e8 = make_named("E8");
  EXPECT_EQ(kind_of([&] { split_condition(InvolutionData(e8, IntMat::identity(8))); }), ErrorKind::CatalogInconsistent);
}

TEST(HalfSubgroup, DoubledRootLattices) {
  auto half_form = [](const std::string& name) {
    Lattice l = make_named(name);
    return restrict_form(discriminant_form(l), half_subgroup(l));
  };
  EXPECT_TRUE(matches(half_form("E8(2)"), "u4"));
  EXPECT_TRUE(matches(half_form("A1(2)"), "w"));
  EXPECT_TRUE(matches(half_form("D4(2)"), "v+z2"));
  EXPECT_EQ(kind_of([] { half_subgroup(make_named("D4")); }), ErrorKind::NotDoubled);
}

TEST(HMinus, ClassesPerSplit) {
  const std::map<std::string, std::vector<std::string>> expected = {
      {"{0}", {"u4", "u3+w", "u3+z"}}, {"A1", {"u3+w", "u2+w2"}}, {"A1^2", {"u2+w2", "u+w3"}},
      {"A1^3", {"u+w3", "w4"}},        {"D4", {"v+z2", "w+z2"}},  {"A1^4", {"w4"}},
      {"D4+A1", {"w3"}},               {"D6", {"w2"}},            {"E7", {"w"}},
      {"E8", {"---"}}};
  std::size_t total = 0;
  for (const auto& sp : pairs()) {
    auto hs = admissible_H_minus(sp);
    const auto& want = expected.at(sp.name_plus);
    ASSERT_EQ(hs.size(), want.size()) << sp.name_plus;
    for (const auto& label : want) EXPECT_NO_THROW(h_labelled(hs, label)) << sp.name_plus << " " << label;
    for (const auto& h : hs) EXPECT_TRUE(is_subgroup_of(sp.a_minus.orders, sp.gamma_minus, h.h)) << sp.name_plus;
    total += hs.size();
  }
  EXPECT_EQ(total, 16u);
}

TEST(HTilde, OnlyDegenerateGlueEnlargesH) {
  const auto& sp = split_named("D4");
  auto hs = admissible_H_minus(sp);
  auto from_v = admissible_H_tilde(sp, h_labelled(hs, "v+z2"));
  ASSERT_EQ(from_v.size(), 2u) << ::testing::PrintToString(labels_of(from_v));
  EXPECT_NO_THROW(h_labelled(from_v, "v+z2"));
  EXPECT_NO_THROW(h_labelled(from_v, "w+z2"));
  for (const auto& c : from_v) EXPECT_FALSE(matches(c.form, "z2")) << "(v+z2, z2) must not be realized";
  auto from_w = admissible_H_tilde(sp, h_labelled(hs, "w+z2"));
  ASSERT_EQ(from_w.size(), 2u) << ::testing::PrintToString(labels_of(from_w));
  EXPECT_NO_THROW(h_labelled(from_w, "w+z2"));
  EXPECT_NO_THROW(h_labelled(from_w, "z2"));
}

TEST(HTilde, EqualsHAwayFromD4) {
  const auto& sp = split_named("A1^2");
  for (const auto& h : admissible_H_minus(sp)) {
    auto ht = admissible_H_tilde(sp, h);
    ASSERT_EQ(ht.size(), 1u) << h.label;
    EXPECT_EQ(ht[0].desc, h.desc) << h.label;
  }
}

TEST(KMinus, RepresentativeRows) {
  {
    const auto& sp = split_named("{0}");
    EXPECT_TRUE(matches(compute_k_minus(sp, h_labelled(admissible_H_minus(sp), "u4").h), "u"));
    EXPECT_TRUE(matches(compute_k_minus(sp, h_labelled(admissible_H_minus(sp), "u3+z").h), "u2"));
  }
  {
    const auto& sp = split_named("A1");
    FQF k = compute_k_minus(sp, h_labelled(admissible_H_minus(sp), "u3+w").h);
    EXPECT_TRUE(matches(k, "u+<-1/4>"));
    EXPECT_EQ(match_K_minus(k, sp.s_minus.rank()).name(), "U+U(2)+A1(2)");
  }
  {
    const auto& sp = split_named("E8");
    FQF k = compute_k_minus(sp, admissible_H_minus(sp).at(0).h);
    EXPECT_TRUE(matches(k, "u5"));
    EXPECT_EQ(match_K_minus(k, sp.s_minus.rank()).name(), "U+U(2)+E8(2)");
  }
}

TEST(KMinus, MatchFailsOnForeignForm) {
  EXPECT_EQ(kind_of([] { match_K_minus(parse_form_label("<1/2>"), 0); }), ErrorKind::NoMatch);
}

TEST(KPlus, IsUTwoPlusSMinus) {
  for (const auto& sp : pairs()) {
    Lattice k = build_K_plus(sp);
    EXPECT_EQ(k.rank(), 2 + sp.s_minus.rank()) << sp.name_plus;
    EXPECT_EQ(abs(k.det()), 4 * abs(sp.s_minus.lattice().det())) << sp.name_plus;
    EXPECT_EQ(k.signature().first, 1u) << sp.name_plus;
  }
}

TEST(GlueSize, LFromDeterminantAndGlue) {
  const Lattice u2 = make_named("U(2)");
  const Lattice e8x2 = make_named("E8(2)");
  const Lattice d4x2 = make_named("D4(2)");
  // 2^10 * 2^8 glued along 2^8: l = 2.
  EXPECT_EQ(l_from_gluesize(direct_sum(u2, e8x2), e8x2, Int(256)), 2u);
  // 2^8 * 2^6 glued along z2 (order 4): l = 10; along w+z2 (order 8): l = 8.
  EXPECT_EQ(l_from_gluesize(direct_sum(u2, d4x2), d4x2, Int(4)), 10u);
  EXPECT_EQ(l_from_gluesize(direct_sum(u2, d4x2), d4x2, Int(8)), 8u);
  EXPECT_EQ(kind_of([&] { l_from_gluesize(u2, d4x2, Int(3)); }), ErrorKind::NotPowerOfTwo);
  EXPECT_EQ(kind_of([&] { l_from_gluesize(u2, d4x2, Int(1024)); }), ErrorKind::NotPowerOfTwo);
}

TEST(FixedLocus, GenusAndRationalCurves) {
  FixedLocusX a = fixed_locus_theta({18, 2, 0});
  EXPECT_EQ(a.str(), "genus 1 curve + 8 rational curves");
  EXPECT_EQ(a.euler(), 16);
  EXPECT_EQ(fixed_locus_theta({2, 2, 0}).str(), "genus 9 curve");
  EXPECT_EQ(fixed_locus_theta({10, 8, 0}).str(), "two elliptic curves");
  EXPECT_EQ(fixed_locus_theta({10, 10, 0}).str(), "empty");
  EXPECT_EQ(fixed_locus_theta({10, 8, 1}).str(), "genus 2 curve + 1 rational curve");
  EXPECT_EQ(kind_of([] { fixed_locus_theta({10, 12, 0}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { fixed_locus_theta({10, 9, 0}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { fixed_locus_theta({10, 8, 2}); }), ErrorKind::InvalidArgument);
}

TEST(Classify, DeterministicAcrossThreadCounts) {
  auto a = classify_all(1);
  auto b = classify_all(4);
  ASSERT_EQ(a.size(), 18u);
  ASSERT_EQ(b.size(), 18u);
  for (std::size_t i = 0; i < 18; ++i) {
    EXPECT_EQ(a[i].no, static_cast<int>(i + 1));
    EXPECT_EQ(a[i].h_minus.label, b[i].h_minus.label);
    EXPECT_EQ(a[i].h_tilde.label, b[i].h_tilde.label);
    EXPECT_EQ(form_label(a[i].k_minus), form_label(b[i].k_minus));
    EXPECT_EQ(a[i].K_minus_name, b[i].K_minus_name);
    EXPECT_EQ(a[i].rld, b[i].rld);
    EXPECT_EQ(a[i].glues, b[i].glues);
  }
}
