#pragma once

// Classification engine for involutions on Enriques surfaces.
//
// Model. S = E8(2) carries theta with eigenlattices S+ (+1) and S- (-1).
// L+ = U(2) + (S+ + S-')^ where S-' is a copy of S-, so K+ = U(2) + S-' and
// Gamma_{K+S+} is the image of Gamma_{S+S-} under S- -> S-'. The glue of
// L+ + S- (S- the real anti-invariant part) is the graph of an
// anti-isometry gamma: H- -> A_{L+}, forced on Gamma- by S itself:
// gamma(gamma_S(x)) = [(0, x)].

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "enrinv/catalog.hpp"

namespace enrinv {

namespace detail {

inline Elem concat(const Elem& a, const Elem& b) {
  Elem c = a;
  c.insert(c.end(), b.begin(), b.end());
  return c;
}

inline Elem slice(const Elem& a, std::size_t from, std::size_t to) { return Elem(a.begin() + from, a.begin() + to); }

inline std::size_t table_index(const ElementTable& t, const Elem& e) {
  std::vector<long long> c(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) c[i] = to_ll(e[i]);
  return t.index_of(c);
}

/// Membership mask of the subgroup generated by `gens` (table indices).
inline std::vector<char> span_mask(const ElementTable& t, const std::vector<std::size_t>& gens) {
  std::vector<char> mask(t.size, 0);
  std::vector<std::size_t> list{0};
  mask[0] = 1;
  for (auto g : gens)
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::size_t y = t.add(list[i], g);
      if (!mask[y]) {
        mask[y] = 1;
        list.push_back(y);
      }
    }
  return mask;
}

inline std::vector<std::size_t> mask_elements(const std::vector<char>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

/// Unit vectors e_i for the coordinates in [from, to) of a group with `n` coordinates.
inline Subgroup coordinate_block(const std::vector<Int>& orders, std::size_t from, std::size_t to) {
  Subgroup s;
  for (std::size_t i = from; i < to; ++i) {
    Elem e(orders.size());
    e[i] = 1;
    s.gens.push_back(e);
  }
  return s;
}

inline Subgroup projected(const Subgroup& h, std::size_t from, std::size_t to) {
  Subgroup p;
  for (const auto& g : h.gens) {
    Elem e = slice(g, from, to);
    if (!is_zero(e)) p.gens.push_back(e);
  }
  return p;
}

/// q * n as an integer mod 2n, or nullopt when q is not a multiple of 1/n.
inline std::optional<long long> scaled_q(const Rat& q, long long n) {
  Rat v = q * Rat(n);
  if (!is_integral(v)) return std::nullopt;
  return to_ll(mod_floor(numer(v), Int(2 * n)));
}

inline std::optional<long long> scaled_b(const Rat& b, long long n) {
  Rat v = b * Rat(n);
  if (!is_integral(v)) return std::nullopt;
  return to_ll(mod_floor(numer(v), Int(n)));
}

inline IntMat halved(const IntMat& g) {
  IntMat h(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (g(i, j) % 2 != 0) fail(ErrorKind::NotDoubled, "Gram matrix has an odd entry");
      h(i, j) = g(i, j) / 2;
    }
  return h;
}

/// Greedy F2-basis of the elementary abelian subgroup generated by `gens`,
/// extending the independent list `start`.
inline std::vector<Elem> extend_basis(const ElementTable& t, std::vector<Elem> start, const std::vector<Elem>& gens) {
  std::vector<std::size_t> idx;
  for (const auto& e : start) idx.push_back(table_index(t, e));
  std::vector<char> mask = span_mask(t, idx);
  for (const auto& g : gens) {
    std::size_t i = table_index(t, g);
    if (mask[i]) continue;
    start.push_back(g);
    idx.push_back(i);
    mask = span_mask(t, idx);
  }
  return start;
}

inline bool all_two(const std::vector<Int>& orders) {
  return std::all_of(orders.begin(), orders.end(), [](const Int& o) { return o == 2; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Condition splits

struct ConditionSplit {
  std::string name_plus, name_minus;  ///< isometry classes of S+(1/2), S-(1/2)
  Lattice s;
  InvolutionData theta;
  Sublattice s_plus, s_minus;
  DiscriminantGroup a_plus, a_minus;
  FQF q_plus, q_minus;
  GlueGroup glue;  ///< Gamma_gamma = S/(S+ + S-) inside A_{S+} + A_{S-}
  Subgroup gamma_plus, gamma_minus;
  std::vector<std::pair<Elem, Elem>> graph;  ///< every (x, gamma x), x in Gamma+

  /// The x in Gamma+ with gamma(x) = h.
  Elem gamma_inverse(const Elem& h) const {
    for (const auto& [x, y] : graph)
      if (y == reduce(a_minus.orders, h)) return x;
    fail(ErrorKind::InvalidArgument, "element is not in Gamma-");
  }
};

namespace detail {

/// Rank 8, even, all pairings even, half-scaling even unimodular negative definite.
inline void check_e8x2(const Lattice& l, const std::string& what) {
  auto bad = [&](const std::string& why) { fail(ErrorKind::CatalogInconsistent, what + ": " + why); };
  if (l.rank() != 8) bad("rank is not 8");
  if (abs(l.det()) != 256) bad("determinant is not 2^8");
  IntMat h = halved(l.gram());
  Lattice half(h);
  if (!half.is_even() || abs(half.det()) != 1) bad("half-scaling is not even unimodular");
  if (half.signature() != std::make_pair(std::size_t{0}, std::size_t{8})) bad("not negative definite");
  if (!short_vectors(l, Int(-2)).empty()) bad("contains a vector of norm -2");
}

}  // namespace detail

inline ConditionSplit split_condition(const InvolutionData& theta, std::string name_plus = "", std::string name_minus = "") {
  detail::check_e8x2(theta.lattice, "involution lattice");
  ConditionSplit sp;
  sp.name_plus = std::move(name_plus);
  sp.name_minus = std::move(name_minus);
  sp.s = theta.lattice;
  sp.theta = theta;
  Eigenlattices eig = involution_eigenlattices(theta);
  sp.s_plus = eig.fixed;
  sp.s_minus = eig.anti;
  sp.glue = glue_group(sp.s_plus, sp.s_minus);
  sp.a_plus = sp.glue.as;
  sp.a_minus = sp.glue.at;
  sp.q_plus = discriminant_form(sp.a_plus);
  sp.q_minus = discriminant_form(sp.a_minus);
  sp.gamma_plus = sp.glue.proj_s;
  sp.gamma_minus = sp.glue.proj_t;
  const std::size_t np = sp.a_plus.orders.size();
  std::set<Elem> xs, ys;
  for (const auto& e : subgroup_elements(sp.glue.orders, sp.glue.gamma)) {
    Elem x = detail::slice(e, 0, np), y = detail::slice(e, np, e.size());
    sp.graph.emplace_back(x, y);
    xs.insert(x);
    ys.insert(y);
  }
  if (xs.size() != sp.graph.size() || ys.size() != sp.graph.size())
    fail(ErrorKind::CatalogInconsistent, "glue of the eigenlattices is not a graph");
  Overlattice rec = overlattice_from_glue(direct_sum(sp.a_plus, sp.a_minus), sp.glue.gamma);
  detail::check_e8x2(rec.lattice, "glued eigenlattices");
  return sp;
}

/// The ten splits from the catalog embeddings, each verified against its
/// claimed pair by definite isometry.
inline std::vector<ConditionSplit> enumerate_pairs() {
  const Lattice e8 = make_named("E8");
  const Lattice e8x2 = make_named("E8(2)");
  std::vector<ConditionSplit> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& rec : embeddings()) {
    InvolutionData inv = involution_from_orthogonal_pair(e8, Sublattice(e8, rec.rows));
    ConditionSplit sp = split_condition(InvolutionData(e8x2, inv.matrix), rec.name, rec.partner);
    auto check = [&](const Sublattice& part, const std::string& name) {
      Lattice half(detail::halved(part.gram()));
      if (!is_isometric_definite(half, make_named(name)))
        fail(ErrorKind::CatalogInconsistent, "eigenlattice is not " + name + "(2) for embedding " + rec.name);
    };
    check(sp.s_plus, rec.name);
    check(sp.s_minus, rec.partner);
    if (!seen.insert({rec.name, rec.partner}).second) fail(ErrorKind::CatalogInconsistent, "duplicate pair " + rec.name);
    out.push_back(std::move(sp));
  }
  return out;
}

/// (1/2 L)/L inside A_L for a doubled lattice L.
inline Subgroup half_subgroup(const DiscriminantGroup& a) {
  const IntMat& g = a.lattice.gram();
  detail::halved(g);
  Subgroup h;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    std::vector<Rat> v(g.rows());
    v[i] = Rat(1, 2);
    Elem e = a.class_of(v);
    if (!is_zero(e)) h.gens.push_back(e);
  }
  return h;
}

inline Subgroup half_subgroup(const Lattice& l) { return half_subgroup(discriminant_group(l)); }

// ---------------------------------------------------------------------------
// H- candidates

struct HClass {
  Subgroup h;
  FQF form;  ///< q_{S-} restricted to h
  FormDescriptor desc;
  std::string label;
};

inline HClass make_hclass(const FQF& q, const Subgroup& h) {
  HClass c;
  c.h = h;
  c.form = restrict_form(q, h);
  c.desc = descriptor(c.form);
  c.label = form_label(c.form);
  return c;
}

/// Subgroups Gamma- <= H <= (1/2 S-)/S- with q|H integral, corank at most one
/// and q|Gamma- an orthogonal summand of q|H; one per descriptor, sorted.
inline std::vector<HClass> admissible_H_minus(const ConditionSplit& sp) {
  const auto& orders = sp.a_minus.orders;
  const FQF& q = sp.q_minus;
  Subgroup half = half_subgroup(sp.a_minus);
  if (!is_subgroup_of(orders, sp.gamma_minus, half)) fail(ErrorKind::CatalogInconsistent, "Gamma- is not in the half group");
  Presentation p = present(orders, half);
  if (!detail::all_two(p.orders)) fail(ErrorKind::CatalogInconsistent, "half group is not 2-elementary");
  const std::size_t n = p.orders.size();
  auto combine = [&](const std::vector<int>& c) {
    Elem x(orders.size());
    for (std::size_t i = 0; i < n; ++i)
      if (c[i])
        for (std::size_t j = 0; j < orders.size(); ++j) x[j] += p.gens[i][j];
    return reduce(orders, x);
  };
  std::vector<Subgroup> candidates{half};
  for (std::size_t f = 1; n > 0 && f < (std::size_t{1} << n); ++f) {
    // kernel of the functional f on F2^n
    std::size_t pivot = 0;
    while (!((f >> pivot) & 1)) ++pivot;
    Subgroup h;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == pivot) continue;
      std::vector<int> c(n, 0);
      c[i] = 1;
      if ((f >> i) & 1) c[pivot] = 1;
      h.gens.push_back(combine(c));
    }
    candidates.push_back(h);
  }
  Subgroup gperp = orthogonal_subgroup(q, sp.gamma_minus);
  std::map<FormDescriptor, HClass> classes;
  for (const auto& h : candidates) {
    if (!is_subgroup_of(orders, sp.gamma_minus, h)) continue;
    bool integral = std::all_of(h.gens.begin(), h.gens.end(), [&](const Elem& g) { return q.q_scaled(g) % q.denominator() == 0; });
    if (!integral) continue;
    Subgroup r = subgroup_intersection(orders, gperp, h);
    if (subgroup_order(orders, subgroup_sum(r, sp.gamma_minus)) != subgroup_order(orders, h)) continue;
    HClass c = make_hclass(q, h);
    classes.emplace(c.desc, c);
  }
  std::vector<HClass> out;
  for (auto& [d, c] : classes) out.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// A_{L+} and glue maps

struct LPlusModel {
  DiscriminantGroup a_k;  ///< A_{K+} = A_{U(2)} + A_{S-'}
  DiscriminantGroup a_w;  ///< A_{K+} + A_{S+}
  std::size_t nk = 0, np = 0;
  FQF q_w;
  Subgroup gamma_ks;   ///< Gamma_{K+S+}
  Presentation pres;   ///< A_{L+} = gamma_ks^perp / gamma_ks
  FQF q_l;
  ElementTable table;
  std::vector<char> confined;     ///< classes with a lift in (1/2 K+/K+) + (1/2 S+/S+)
  std::vector<char> from_s_plus;  ///< classes with a lift in 0 + A_{S+}
  std::vector<char> from_k_plus;  ///< classes with a lift in A_{K+} + 0
  std::vector<Elem> k_rep;        ///< that A_{K+} lift, for classes in from_k_plus

  std::size_t index_of_w(const Elem& w) const { return detail::table_index(table, pres.coords(w)); }

  Elem w_of(std::size_t idx) const {
    Elem w(a_w.orders.size());
    const long long* c = table.x(idx);
    for (std::size_t i = 0; i < table.k; ++i)
      for (std::size_t j = 0; j < w.size(); ++j) w[j] += Int(c[i]) * pres.gens[i][j];
    return reduce(a_w.orders, w);
  }
};

inline Lattice build_K_plus(const ConditionSplit& sp) {
  std::string name = "U(2)";
  if (sp.s_minus.rank() > 0) name += "+" + (sp.name_minus.empty() ? std::string("S-") : sp.name_minus) + "(2)";
  return direct_sum(make_named("U(2)"), sp.s_minus.lattice(), name);
}

inline LPlusModel build_L_plus_model(const ConditionSplit& sp) {
  LPlusModel m;
  m.a_k = direct_sum(discriminant_group(make_named("U(2)")), sp.a_minus);
  m.a_w = direct_sum(m.a_k, sp.a_plus);
  m.nk = m.a_k.orders.size();
  m.np = sp.a_plus.orders.size();
  const auto& wo = m.a_w.orders;
  m.q_w = discriminant_form(m.a_w);
  const std::size_t nu = m.nk - sp.a_minus.orders.size();
  const std::size_t ns = sp.a_plus.orders.size();
  // ((0, gamma x), x): the copy of Gamma_{S+S-} with S- moved into K+
  for (const auto& g : sp.glue.gamma.gens) {
    Elem x = detail::slice(g, 0, ns), y = detail::slice(g, ns, g.size());
    m.gamma_ks.gens.push_back(detail::concat(detail::concat(Elem(nu), y), x));
  }
  Subgroup perp = orthogonal_subgroup(m.q_w, m.gamma_ks);
  m.pres = present_quotient(wo, perp, m.gamma_ks);
  m.q_l = m.q_w.pulled_back(m.pres.orders, m.pres.gens);
  if (!is_isomorphic(m.q_l, parse_form_label("u5"))) fail(ErrorKind::CatalogInconsistent, "A_{L+} is not u^5");
  m.table = element_table(m.q_l, kIsomorphismLimit);

  auto image_mask = [&](const Subgroup& sub) {
    Subgroup s = subgroup_intersection(wo, sub, perp);
    std::vector<std::size_t> idx;
    for (const auto& g : s.gens) idx.push_back(m.index_of_w(g));
    return detail::span_mask(m.table, idx);
  };
  Subgroup two_torsion;
  for (std::size_t i = 0; i < wo.size(); ++i) {
    Elem e(wo.size());
    e[i] = wo[i] / 2;
    if (wo[i] % 2 == 0) two_torsion.gens.push_back(e);
  }
  m.confined = image_mask(two_torsion);
  m.from_s_plus = image_mask(detail::coordinate_block(wo, m.nk, wo.size()));
  Subgroup kpart = subgroup_intersection(wo, detail::coordinate_block(wo, 0, m.nk), perp);
  m.from_k_plus.assign(m.table.size, 0);
  m.k_rep.assign(m.table.size, Elem());
  for (const auto& w : subgroup_elements(wo, kpart)) {
    std::size_t i = m.index_of_w(w);
    if (m.from_k_plus[i]) fail(ErrorKind::CatalogInconsistent, "A_{K+} part meets Gamma_{K+S+}");
    m.from_k_plus[i] = 1;
    m.k_rep[i] = detail::slice(w, 0, m.nk);
  }
  return m;
}

/// gamma_{H-} on an F2-basis of H-, the Gamma- part first.
struct GlueMap {
  std::vector<Elem> basis;
  std::size_t forced = 0;
  std::vector<std::size_t> images;  ///< indices into LPlusModel::table
};

struct GlueSearchStats {
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  bool complete = true;  ///< false when stopped early by the visitor
};

inline constexpr std::size_t kGlueNodeBudget = 2000000;

/// Enumerates anti-isometries gamma: H- -> A_{L+} that agree with the forced
/// part on Gamma-, take values in the confined subgroup, are injective, and
/// keep S primitive (gamma(h) comes from A_{S+} only for h in Gamma-).
inline GlueSearchStats search_glue_maps(const ConditionSplit& sp, const LPlusModel& m, const Subgroup& h,
                                        const std::function<bool(const GlueMap&)>& visit,
                                        std::size_t node_budget = kGlueNodeBudget) {
  const auto& so = sp.a_minus.orders;
  const FQF& qs = sp.q_minus;
  ElementTable ts = element_table(qs, kIsomorphismLimit);
  Presentation pg = present(so, sp.gamma_minus), ph = present(so, h);
  if (!detail::all_two(pg.orders) || !detail::all_two(ph.orders))
    fail(ErrorKind::InvalidArgument, "H- must be 2-elementary");
  GlueMap map;
  map.basis = detail::extend_basis(ts, pg.gens, ph.gens);
  map.forced = pg.gens.size();
  if (map.basis.size() != ph.gens.size()) fail(ErrorKind::InvalidArgument, "Gamma- is not inside H-");
  const std::size_t dim = map.basis.size();
  const long long n = m.table.n;

  GlueSearchStats stats;
  std::vector<long long> tq(dim);
  std::vector<std::vector<long long>> tb(dim, std::vector<long long>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    auto v = detail::scaled_q(-qs.q(map.basis[i]), n);
    if (!v) return stats;
    tq[i] = *v;
    for (std::size_t j = 0; j < i; ++j) {
      auto b = detail::scaled_b(-qs.b(map.basis[i], map.basis[j]), n);
      if (!b) return stats;
      tb[i][j] = *b;
    }
  }
  auto fits = [&](std::size_t j, std::size_t y) {
    if (m.table.qv[y] != tq[j]) return false;
    for (std::size_t i = 0; i < j; ++i)
      if (m.table.b(y, map.images[i]) != tb[j][i]) return false;
    return true;
  };

  map.images.assign(dim, 0);
  std::vector<std::size_t> span{0};
  for (std::size_t j = 0; j < map.forced; ++j) {
    Elem w = detail::concat(Elem(m.nk), sp.gamma_inverse(map.basis[j]));
    std::size_t y = m.index_of_w(w);
    if (!m.confined[y] || !m.from_s_plus[y] || !fits(j, y))
      fail(ErrorKind::CatalogInconsistent, "forced glue on Gamma- violates the constraints");
    map.images[j] = y;
    std::size_t s = span.size();
    for (std::size_t a = 0; a < s; ++a) span.push_back(m.table.add(span[a], y));
  }
  if (std::set<std::size_t>(span.begin(), span.end()).size() != span.size())
    fail(ErrorKind::CatalogInconsistent, "forced glue on Gamma- is not injective");

  bool stop = false;
  std::function<void(std::size_t, std::vector<std::size_t>&)> dfs = [&](std::size_t j, std::vector<std::size_t>& sp_imgs) {
    if (stop) return;
    if (j == dim) {
      ++stats.leaves;
      if (!visit(map)) {
        stop = true;
        stats.complete = false;
      }
      return;
    }
    for (std::size_t y = 0; y < m.table.size && !stop; ++y) {
      if (!m.confined[y] || !fits(j, y)) continue;
      bool ok = true;
      for (auto a : sp_imgs)
        if (m.from_s_plus[m.table.add(a, y)]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (++stats.nodes > node_budget) fail(ErrorKind::ResourceLimit, "glue search exceeded its node budget");
      map.images[j] = y;
      std::vector<std::size_t> next = sp_imgs;
      for (auto a : sp_imgs) next.push_back(m.table.add(a, y));
      dfs(j + 1, next);
    }
  };
  dfs(map.forced, span);
  return stats;
}

/// H~ and Gamma_{K+S-} determined by a glue map.
struct GlueOutcome {
  GlueMap map;
  Subgroup h_tilde;
  Subgroup glue_ks;  ///< in A_{K+} + A_{S-}
  std::vector<std::pair<std::size_t, std::size_t>> key;  ///< sorted (h, gamma h) over H~
};

inline GlueOutcome glue_outcome(const ConditionSplit& sp, const LPlusModel& m, const GlueMap& map) {
  const auto& so = sp.a_minus.orders;
  GlueOutcome out;
  out.map = map;
  const std::size_t dim = map.basis.size();
  ElementTable ts = element_table(sp.q_minus, kIsomorphismLimit);
  std::vector<std::size_t> hb;
  for (const auto& b : map.basis) hb.push_back(detail::table_index(ts, b));
  std::vector<std::size_t> hs, ys;
  std::vector<std::size_t> tilde_h;
  for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
    std::size_t hi = 0, yi = 0;
    for (std::size_t i = 0; i < dim; ++i)
      if ((mask >> i) & 1) {
        hi = ts.add(hi, hb[i]);
        yi = m.table.add(yi, map.images[i]);
      }
    if (!m.from_k_plus[yi]) continue;
    out.key.emplace_back(hi, yi);
    if (hi == 0) continue;
    bool kzero = is_zero(m.k_rep[yi]);
    if (kzero) fail(ErrorKind::CatalogInconsistent, "K+ is not primitive in T");
    tilde_h.push_back(hi);
    // keep an F2-basis of H~ and the matching glue generators
    std::vector<std::size_t> cur;
    for (const auto& g : out.h_tilde.gens) cur.push_back(detail::table_index(ts, g));
    if (detail::span_mask(ts, cur)[hi]) continue;
    Elem h = ts.elem(hi);
    out.h_tilde.gens.push_back(h);
    out.glue_ks.gens.push_back(detail::concat(m.k_rep[yi], h));
  }
  std::sort(out.key.begin(), out.key.end());
  (void)so;
  return out;
}

/// T = (K+ + S-)^ glued along Gamma_{K+S-}; must be even and 2-elementary.
inline Overlattice build_T(const ConditionSplit& sp, const LPlusModel& m, const GlueOutcome& g) {
  Overlattice t = overlattice_from_glue(direct_sum(m.a_k, sp.a_minus), g.glue_ks);
  if (!t.lattice.is_even()) fail(ErrorKind::NoAdmissibleGlue, "T is not even");
  two_elementary_invariants(t.lattice);
  return t;
}

inline std::size_t log2_exact(const Int& v) {
  Int a = abs(v);
  if (a == 0) fail(ErrorKind::NotPowerOfTwo, "zero is not a power of two");
  std::size_t e = 0;
  while (a % 2 == 0) {
    a /= 2;
    ++e;
  }
  if (a != 1) fail(ErrorKind::NotPowerOfTwo, "value is not a power of two");
  return e;
}

/// l = log2 det(K+ + S-) - 2 log2 |H~|.
inline std::size_t l_from_gluesize(const Lattice& k_plus, const Lattice& s_minus, const Int& h_tilde_order) {
  std::size_t d = log2_exact(k_plus.det() * s_minus.det());
  std::size_t h = log2_exact(h_tilde_order);
  if (2 * h > d) fail(ErrorKind::NotPowerOfTwo, "glue larger than the determinant allows");
  return d - 2 * h;
}

// ---------------------------------------------------------------------------
// H~ realization

struct HTildeClass {
  HClass h_tilde;
  GlueOutcome witness;
  Overlattice t;
  TwoElemInvariants rld;
  std::size_t glues = 0;  ///< distinct Gamma_{K+S-} found with this H~ class
};

struct HTildeSearch {
  std::vector<HTildeClass> classes;  ///< sorted by descriptor
  GlueSearchStats stats;
  bool exhaustive = false;
  std::size_t rejected = 0;  ///< glues whose T is not 2-elementary
};

inline bool is_d4_split(const ConditionSplit& sp) {
  return sp.s_minus.rank() == 4 && abs(sp.s_minus.lattice().det()) == 64 && sp.name_minus != "A1^4";
}

/// Searches glue maps for H-. D4-size rows are exhausted; elsewhere the first
/// `sample` distinct glues are examined.
inline HTildeSearch realize_H_tilde(const ConditionSplit& sp, const LPlusModel& m, const Subgroup& h, bool exhaustive,
                                    std::size_t sample = 4) {
  HTildeSearch res;
  res.exhaustive = exhaustive;
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
  std::map<FormDescriptor, HTildeClass> classes;
  std::size_t distinct = 0;
  res.stats = search_glue_maps(sp, m, h, [&](const GlueMap& map) {
    GlueOutcome g = glue_outcome(sp, m, map);
    if (!seen.insert(g.key).second) return true;
    Overlattice t;
    try {
      t = build_T(sp, m, g);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotTwoElementary) throw;
      ++res.rejected;
      return true;
    }
    ++distinct;
    TwoElemInvariants rld = two_elementary_invariants(t.lattice);
    HClass hc = make_hclass(sp.q_minus, g.h_tilde);
    auto it = classes.find(hc.desc);
    if (it == classes.end()) {
      classes.emplace(hc.desc, HTildeClass{hc, g, t, rld, 1});
    } else {
      if (it->second.rld != rld)
        fail(ErrorKind::CatalogInconsistent,
             "glues with the same H~ give different (r,l,delta): " + it->second.rld.str() + " vs " + rld.str());
      ++it->second.glues;
    }
    return exhaustive || distinct < sample;
  });
  for (auto& [d, c] : classes) res.classes.push_back(std::move(c));
  return res;
}

inline std::vector<HClass> admissible_H_tilde(const ConditionSplit& sp, const HClass& h) {
  LPlusModel m = build_L_plus_model(sp);
  HTildeSearch s = realize_H_tilde(sp, m, h.h, is_d4_split(sp));
  std::vector<HClass> out;
  for (const auto& c : s.classes) out.push_back(c.h_tilde);
  return out;
}

// ---------------------------------------------------------------------------
// k- and K-

struct KMinusResult {
  FQF k_minus;
  std::size_t embeddings = 0;  ///< distinct embeddings H- -> u^5 compared
  bool independent = true;
};

namespace detail {

/// First embedding of (H-, -q_{S-}) into u^5, scanning candidates in the given direction.
inline std::optional<std::vector<std::size_t>> embed_in_u5(const std::vector<Elem>& basis, const FQF& qs, const ElementTable& tu,
                                                           bool reverse) {
  const std::size_t dim = basis.size();
  const long long n = tu.n;
  std::vector<long long> tq(dim);
  std::vector<std::vector<long long>> tb(dim, std::vector<long long>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    auto v = scaled_q(-qs.q(basis[i]), n);
    if (!v) return std::nullopt;
    tq[i] = *v;
    for (std::size_t j = 0; j < i; ++j) {
      auto b = scaled_b(-qs.b(basis[i], basis[j]), n);
      if (!b) return std::nullopt;
      tb[i][j] = *b;
    }
  }
  std::vector<std::size_t> img(dim);
  std::vector<char> used(tu.size, 0);
  std::function<bool(std::size_t, std::vector<std::size_t>&)> dfs = [&](std::size_t j, std::vector<std::size_t>& span) {
    if (j == dim) return true;
    for (std::size_t s = 0; s < tu.size; ++s) {
      std::size_t y = reverse ? tu.size - 1 - s : s;
      if (tu.qv[y] != tq[j]) continue;
      bool ok = true;
      for (std::size_t i = 0; i < j && ok; ++i) ok = tu.b(y, img[i]) == tb[j][i];
      if (!ok) continue;
      if (std::find(span.begin(), span.end(), y) != span.end()) continue;
      img[j] = y;
      std::vector<std::size_t> next = span;
      for (auto a : span) next.push_back(tu.add(a, y));
      if (dfs(j + 1, next)) return true;
    }
    return false;
  };
  std::vector<std::size_t> span{0};
  if (!dfs(0, span)) return std::nullopt;
  return img;
}

}  // namespace detail

/// k- = ((-q_{S-} + -u^5)|Gamma^perp)/Gamma for Gamma the graph of an
/// embedding of H- into u^5; two embeddings are compared when available.
inline KMinusResult compute_k_minus_detailed(const ConditionSplit& sp, const Subgroup& h) {
  const auto& so = sp.a_minus.orders;
  FQF u5 = parse_form_label("u5");
  ElementTable tu = element_table(u5, kIsomorphismLimit);
  Presentation ph = present(so, h);
  if (!detail::all_two(ph.orders)) fail(ErrorKind::InvalidArgument, "H- must be 2-elementary");
  const std::vector<Elem>& basis = ph.gens;
  FQF amb = direct_sum(sp.q_minus.negated(), u5.negated());
  auto k_of = [&](const std::vector<std::size_t>& img) {
    Subgroup g;
    for (std::size_t i = 0; i < basis.size(); ++i) g.gens.push_back(detail::concat(basis[i], tu.elem(img[i])));
    return subquotient(amb, g);
  };
  auto e1 = detail::embed_in_u5(basis, sp.q_minus, tu, false);
  if (!e1) fail(ErrorKind::NoEmbedding, "H- does not embed into u^5");
  KMinusResult r;
  r.k_minus = k_of(*e1);
  r.embeddings = 1;
  auto e2 = detail::embed_in_u5(basis, sp.q_minus, tu, true);
  if (e2 && *e2 != *e1) {
    r.embeddings = 2;
    r.independent = is_isomorphic(r.k_minus, k_of(*e2)).has_value();
  }
  return r;
}

inline FQF compute_k_minus(const ConditionSplit& sp, const Subgroup& h) {
  KMinusResult r = compute_k_minus_detailed(sp, h);
  if (!r.independent) fail(ErrorKind::CatalogInconsistent, "k- depends on the embedding of H-");
  return r.k_minus;
}

/// The unique candidate with signature (2, 10 - rank S-) and discriminant form k-.
inline Lattice match_K_minus(const FQF& k_minus, std::size_t rank_s_minus) {
  static const std::vector<std::pair<Lattice, FQF>> cands = [] {
    std::vector<std::pair<Lattice, FQF>> c;
    for (const auto& l : k_minus_candidates()) c.emplace_back(l, discriminant_form(l));
    return c;
  }();
  if (rank_s_minus > 10) fail(ErrorKind::InvalidArgument, "rank of S- exceeds 10");
  const std::pair<std::size_t, std::size_t> sig{2, 10 - rank_s_minus};
  std::vector<const Lattice*> hits;
  for (const auto& [l, q] : cands)
    if (l.signature() == sig && q.order() == k_minus.order() && is_isomorphic(q, k_minus)) hits.push_back(&l);
  if (hits.empty()) fail(ErrorKind::NoMatch, "no K- candidate matches k- = " + form_label(k_minus));
  if (hits.size() > 1) fail(ErrorKind::AmbiguousMatch, "several K- candidates match k- = " + form_label(k_minus));
  return *hits.front();
}

// ---------------------------------------------------------------------------
// The hull N^ = (L+ + S-)^ seen from N = K+ + S+ + S-

struct HullData {
  Int h_plus_order, h_tilde_plus_order;
  bool h_plus_is_half = false;
  FQF q_hull;  ///< discriminant form of N^, expected to be -k-
};

/// Gamma_N is generated by Gamma_{K+S+} and lifts (w, h) of the graph of gamma.
/// H~+ = (p_{S+} Gamma_N)^perp and H+ = p_{S+}((p_{S+S-} Gamma_N)^perp).
inline HullData hull_data(const ConditionSplit& sp, const LPlusModel& m, const GlueMap& map) {
  const auto& wo = m.a_w.orders;
  std::vector<Int> no = wo;
  no.insert(no.end(), sp.a_minus.orders.begin(), sp.a_minus.orders.end());
  Subgroup gn;
  for (const auto& g : m.gamma_ks.gens) gn.gens.push_back(detail::concat(g, Elem(sp.a_minus.orders.size())));
  for (std::size_t i = 0; i < map.basis.size(); ++i) gn.gens.push_back(detail::concat(m.w_of(map.images[i]), map.basis[i]));
  FQF qn = direct_sum(m.q_w, sp.q_minus);
  if (!is_isotropic(qn, gn)) fail(ErrorKind::CatalogInconsistent, "Gamma_N is not isotropic");
  HullData d;
  d.q_hull = subquotient(qn, gn);
  const std::size_t s0 = m.nk, s1 = m.nk + m.np;
  Subgroup ps = detail::projected(gn, s0, s1);
  Subgroup ht = orthogonal_subgroup(sp.q_plus, ps);
  d.h_tilde_plus_order = subgroup_order(sp.a_plus.orders, ht);
  Subgroup pss = detail::projected(gn, s0, no.size());
  Subgroup perp = orthogonal_subgroup(direct_sum(sp.q_plus, sp.q_minus), pss);
  Subgroup hp = detail::projected(perp, 0, m.np);
  d.h_plus_order = subgroup_order(sp.a_plus.orders, hp);
  d.h_plus_is_half = subgroup_equal(sp.a_plus.orders, hp, half_subgroup(sp.a_plus));
  return d;
}

// ---------------------------------------------------------------------------
// Fixed loci

struct FixedLocusX {
  enum class Kind { CurvePlusRationals, TwoElliptic, Empty };
  Kind kind = Kind::Empty;
  int genus = 0;
  int rationals = 0;

  long long euler() const {
    if (kind == Kind::CurvePlusRationals) return (2 - 2LL * genus) + 2LL * rationals;
    return 0;
  }
  std::string str() const {
    switch (kind) {
      case Kind::Empty:
        return "empty";
      case Kind::TwoElliptic:
        return "two elliptic curves";
      case Kind::CurvePlusRationals: {
        std::string s = "genus " + std::to_string(genus) + " curve";
        if (rationals > 0) s += " + " + std::to_string(rationals) + (rationals == 1 ? " rational curve" : " rational curves");
        return s;
      }
    }
    return "";
  }
  friend bool operator==(const FixedLocusX& a, const FixedLocusX& b) {
    return a.kind == b.kind && a.genus == b.genus && a.rationals == b.rationals;
  }
};

/// Fixed locus of theta on X: C(g) + k P1 with g = (22-r-l)/2, k = (r-l)/2,
/// except (10,8,0) (two elliptic curves) and (10,10,0) (empty).
inline FixedLocusX fixed_locus_theta(const TwoElemInvariants& t) {
  if (t.delta != 0 && t.delta != 1) fail(ErrorKind::InvalidArgument, "delta must be 0 or 1");
  if (t.l > t.r || t.r + t.l > 22 || (t.r + t.l) % 2 != 0)
    fail(ErrorKind::InvalidArgument, "invalid (r,l,delta) = " + t.str());
  FixedLocusX f;
  if (t.r == 10 && t.l == 10 && t.delta == 0) return f;
  if (t.r == 10 && t.l == 8 && t.delta == 0) {
    f.kind = FixedLocusX::Kind::TwoElliptic;
    return f;
  }
  f.kind = FixedLocusX::Kind::CurvePlusRationals;
  f.genus = static_cast<int>((22 - t.r - t.l) / 2);
  f.rationals = static_cast<int>((t.r - t.l) / 2);
  return f;
}

inline std::string enriques_fixed_curves(int row_no) { return golden_row(row_no).fixed_y; }

// ---------------------------------------------------------------------------
// Rows

struct ClassRow {
  int no = 0;
  std::size_t pair_index = 0;
  std::string s_plus_name, s_minus_name;
  HClass h_minus, h_tilde;
  FQF k_minus;
  std::size_t k_minus_embeddings = 0;
  bool k_minus_independent = true;
  std::string K_minus_name;
  Lattice K_plus;
  Lattice T;
  TwoElemInvariants rld;
  std::size_t l_glue = 0;
  FixedLocusX fixed_x;
  std::string fixed_y;
  // search and consistency data
  std::size_t glues = 0;
  bool glue_search_exhaustive = false;
  std::size_t glue_nodes = 0;
  Int h_plus_order, h_tilde_plus_order;
  bool h_plus_is_half = false;
  bool hull_is_minus_k = false;
};

namespace detail {

/// Every row for one (split, H-) job.
inline std::vector<ClassRow> rows_for(const ConditionSplit& sp, std::size_t pair_index, const LPlusModel& m, const HClass& h) {
  KMinusResult km = compute_k_minus_detailed(sp, h.h);
  Lattice kminus = match_K_minus(km.k_minus, sp.s_minus.rank());
  HTildeSearch hs = realize_H_tilde(sp, m, h.h, is_d4_split(sp));
  if (hs.classes.empty()) fail(ErrorKind::NoAdmissibleGlue, "no admissible glue for H- = " + h.label);
  Lattice kplus = build_K_plus(sp);
  std::vector<ClassRow> out;
  for (const auto& c : hs.classes) {
    ClassRow r;
    r.pair_index = pair_index;
    r.s_plus_name = sp.name_plus;
    r.s_minus_name = sp.name_minus;
    r.h_minus = h;
    r.h_tilde = c.h_tilde;
    r.k_minus = km.k_minus;
    r.k_minus_embeddings = km.embeddings;
    r.k_minus_independent = km.independent;
    r.K_minus_name = kminus.name();
    r.K_plus = kplus;
    r.T = c.t.lattice;
    r.rld = c.rld;
    r.l_glue = l_from_gluesize(kplus, sp.s_minus.lattice(), subgroup_order(sp.a_minus.orders, c.h_tilde.h));
    r.fixed_x = fixed_locus_theta(c.rld);
    r.glues = c.glues;
    r.glue_search_exhaustive = hs.exhaustive;
    r.glue_nodes = hs.stats.nodes;
    HullData hd = hull_data(sp, m, c.witness.map);
    r.h_plus_order = hd.h_plus_order;
    r.h_tilde_plus_order = hd.h_tilde_plus_order;
    r.h_plus_is_half = hd.h_plus_is_half;
    r.hull_is_minus_k = is_isomorphic(hd.q_hull, km.k_minus.negated()).has_value();
    out.push_back(std::move(r));
  }
  return out;
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// All rows, numbered by the catalog permutation and sorted by number.
/// Work is split into one job per (pair, H-) and may run on `threads` threads;
/// the result does not depend on the thread count.
inline std::vector<ClassRow> classify_all(std::size_t threads = 1) {
  std::vector<ConditionSplit> pairs = enumerate_pairs();
  std::vector<LPlusModel> models(pairs.size());
  std::vector<std::vector<HClass>> hs(pairs.size());
  detail::parallel_for(pairs.size(), threads, [&](std::size_t i) {
    models[i] = build_L_plus_model(pairs[i]);
    hs[i] = admissible_H_minus(pairs[i]);
  });
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < hs[i].size(); ++j) jobs.emplace_back(i, j);
  std::vector<std::vector<ClassRow>> results(jobs.size());
  detail::parallel_for(jobs.size(), threads, [&](std::size_t k) {
    auto [i, j] = jobs[k];
    try {
      results[k] = detail::rows_for(pairs[i], i, models[i], hs[i][j]);
    } catch (const Error& e) {
      fail(e.kind(), "pair (" + pairs[i].name_plus + ", " + pairs[i].name_minus + "), H- = " + hs[i][j].label + ": " + e.what());
    }
  });
  // generation order: pair (S+ rank, then catalog order), then H-, then H~ descriptors
  std::vector<ClassRow> rows;
  for (auto& r : results)
    for (auto& x : r) rows.push_back(std::move(x));
  std::stable_sort(rows.begin(), rows.end(), [&](const ClassRow& a, const ClassRow& b) {
    auto ka = std::make_tuple(pairs[a.pair_index].s_plus.rank(), a.pair_index);
    auto kb = std::make_tuple(pairs[b.pair_index].s_plus.rank(), b.pair_index);
    if (ka != kb) return ka < kb;
    if (a.h_minus.desc != b.h_minus.desc) return a.h_minus.desc < b.h_minus.desc;
    return a.h_tilde.desc < b.h_tilde.desc;
  });
  const auto& perm = row_permutation();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].no = rows.size() == perm.size() ? perm[i] : static_cast<int>(i + 1);
    if (rows[i].no <= 18) rows[i].fixed_y = enriques_fixed_curves(rows[i].no);
  }
  std::sort(rows.begin(), rows.end(), [](const ClassRow& a, const ClassRow& b) { return a.no < b.no; });
  return rows;
}

}  // namespace enrinv
