#pragma once

// Finite abelian groups and finite quadratic forms.
//
// A group is a direct sum of cyclic factors Z/d_i (d_i >= 2, not necessarily a
// divisibility chain so that direct sums stay blockwise; `normalized_orders`
// gives the invariant factors). Elements are residue tuples.
//
// A form is stored as (orders d, denominator N, integer symmetric G) with
//   q(x) = x^T G x / N  mod 2,    b(x, y) = x^T G y / N  mod 1,
// which requires d_i G_ij = 0 mod N and d_i^2 G_ii = 0 mod 2N. The bilinear
// form is read off G, never recovered from q, so the degenerate forms w and z
// on Z/2 are represented faithfully.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enrinv/exactnum.hpp"

namespace enrinv {

using Elem = std::vector<Int>;

inline Int product(const std::vector<Int>& v) {
  Int p = 1;
  for (const auto& x : v) p *= x;
  return p;
}

inline Int lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / boost::multiprecision::gcd(a, b) * b);
}

/// Invariant factors (d_1 | d_2 | ..., all >= 2) of the group with the given cyclic orders.
inline std::vector<Int> normalized_orders(const std::vector<Int>& orders) {
  IntMat d(orders.size(), orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) d(i, i) = orders[i];
  std::vector<Int> out;
  for (const auto& x : smith_normal_form(d).diagonal())
    if (x > 1) out.push_back(x);
  return out;
}

/// Minimal number of generators.
inline std::size_t min_generators(const std::vector<Int>& orders) { return normalized_orders(orders).size(); }

inline Elem reduce(const std::vector<Int>& orders, Elem x) {
  for (std::size_t i = 0; i < orders.size(); ++i) x[i] = mod_floor(x[i], orders[i]);
  return x;
}

inline Elem add(const std::vector<Int>& orders, const Elem& x, const Elem& y) {
  Elem z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = mod_floor(Int(x[i] + y[i]), orders[i]);
  return z;
}

inline Elem scale(const std::vector<Int>& orders, const Elem& x, const Int& n) {
  Elem z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = mod_floor(Int(x[i] * n), orders[i]);
  return z;
}

inline bool is_zero(const Elem& x) {
  return std::all_of(x.begin(), x.end(), [](const Int& v) { return v == 0; });
}

/// Order of x in the group.
inline Int element_order(const std::vector<Int>& orders, const Elem& x) {
  Int o = 1;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    Int g = boost::multiprecision::gcd(mod_floor(x[i], orders[i]), orders[i]);
    o = lcm(o, orders[i] / g);
  }
  return o;
}

// ---------------------------------------------------------------------------
// Subgroups, represented by generators and handled through their lift lattices
// span(gens) + D Z^k inside Z^k.

struct Subgroup {
  std::vector<Elem> gens;
};

inline IntMat lift_basis(const std::vector<Int>& orders, const std::vector<Elem>& gens) {
  const std::size_t k = orders.size();
  IntMat m(gens.size() + k, k);
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = gens[i][j];
  for (std::size_t j = 0; j < k; ++j) m(gens.size() + j, j) = orders[j];
  return hermite_normal_form(m);
}

inline Subgroup whole_group(const std::vector<Int>& orders) {
  Subgroup s;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    Elem e(orders.size());
    e[i] = 1;
    s.gens.push_back(e);
  }
  return s;
}

inline Int subgroup_order(const std::vector<Int>& orders, const Subgroup& h) {
  return product(orders) / determinant(lift_basis(orders, h.gens));
}

inline bool contains(const std::vector<Int>& orders, const Subgroup& h, const Elem& x) {
  IntMat b = lift_basis(orders, h.gens);
  // b is upper triangular with positive diagonal; peel x off row by row
  std::vector<Int> r = x;
  for (std::size_t i = 0; i < b.rows(); ++i) {
    if (r[i] % b(i, i) != 0) return false;
    Int c = r[i] / b(i, i);
    for (std::size_t j = i; j < b.cols(); ++j) r[j] -= c * b(i, j);
  }
  return true;
}

inline bool subgroup_equal(const std::vector<Int>& orders, const Subgroup& a, const Subgroup& b) {
  return lift_basis(orders, a.gens) == lift_basis(orders, b.gens);
}

inline bool is_subgroup_of(const std::vector<Int>& orders, const Subgroup& a, const Subgroup& b) {
  return std::all_of(a.gens.begin(), a.gens.end(), [&](const Elem& g) { return contains(orders, b, g); });
}

inline Subgroup subgroup_sum(const Subgroup& a, const Subgroup& b) {
  Subgroup s = a;
  s.gens.insert(s.gens.end(), b.gens.begin(), b.gens.end());
  return s;
}

inline Subgroup subgroup_from_lattice(const std::vector<Int>& orders, const IntMat& rows) {
  Subgroup s;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    Elem e = reduce(orders, rows.row(i));
    if (!is_zero(e)) s.gens.push_back(e);
  }
  return s;
}

inline Subgroup subgroup_intersection(const std::vector<Int>& orders, const Subgroup& a, const Subgroup& b) {
  IntMat ba = lift_basis(orders, a.gens);
  IntMat bb = lift_basis(orders, b.gens);
  const std::size_t k = orders.size();
  if (k == 0) return {};
  IntMat stacked = vstack(ba, bb.scaled(Int(-1)));
  IntMat ker = kernel_basis(stacked);
  IntMat coeff = ker.block(0, 0, ker.rows(), ba.rows());
  return subgroup_from_lattice(orders, coeff * ba);
}

/// Cyclic decomposition of a quotient H/G (G inside H) with coordinate map.
struct Presentation {
  std::vector<Int> orders;  ///< invariant factors of H/G, each >= 2
  std::vector<Elem> gens;   ///< ambient elements generating H/G
  RatMat basis_inverse;     ///< inverse of the adapted basis of the lift of H
  std::vector<std::size_t> index;  ///< adapted-basis rows that carry nontrivial factors

  /// Coordinates of x (an element of H) in the presentation.
  Elem coords(const Elem& x) const {
    std::vector<Rat> xr(x.begin(), x.end());
    std::vector<Rat> c = row_times(xr, basis_inverse);
    Elem out(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (!is_integral(c[index[i]])) fail(ErrorKind::InvalidArgument, "element outside the presented subgroup");
      out[i] = mod_floor(numer(c[index[i]]), orders[i]);
    }
    return out;
  }
};

inline Presentation present_quotient(const std::vector<Int>& amb, const Subgroup& h, const Subgroup& g) {
  const std::size_t k = amb.size();
  Presentation p;
  if (k == 0) {
    p.basis_inverse = RatMat(0, 0);
    return p;
  }
  IntMat bh = lift_basis(amb, h.gens);
  IntMat bg = lift_basis(amb, g.gens);
  RatMat bhinv = inverse(bh);
  auto c = to_int(to_rat(bg) * bhinv);
  if (!c) fail(ErrorKind::InvalidArgument, "quotient presentation: G is not contained in H");
  SmithForm s = smith_normal_form(*c);
  auto vinv = to_int(inverse(s.V));
  IntMat f = *vinv * bh;
  p.basis_inverse = inverse(f);
  for (std::size_t i = 0; i < k; ++i) {
    if (s.D(i, i) > 1) {
      p.orders.push_back(s.D(i, i));
      p.gens.push_back(reduce(amb, f.row(i)));
      p.index.push_back(i);
    }
  }
  return p;
}

inline Presentation present(const std::vector<Int>& amb, const Subgroup& h) { return present_quotient(amb, h, {}); }

/// Calls f on every element of the group, in mixed-radix order (first coordinate fastest).
inline void for_each_element(const std::vector<Int>& orders, const std::function<void(const Elem&)>& f) {
  Elem x(orders.size());
  for (;;) {
    f(x);
    std::size_t i = 0;
    for (; i < orders.size(); ++i) {
      if (++x[i] < orders[i]) break;
      x[i] = 0;
    }
    if (i == orders.size()) return;
  }
}

/// All elements of a subgroup; the subgroup order must not exceed `limit`.
inline std::vector<Elem> subgroup_elements(const std::vector<Int>& amb, const Subgroup& h, std::size_t limit = 1u << 20) {
  Presentation p = present(amb, h);
  if (product(p.orders) > limit) fail(ErrorKind::ResourceLimit, "subgroup too large to enumerate");
  std::vector<Elem> out;
  for_each_element(p.orders, [&](const Elem& c) {
    Elem x(amb.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < amb.size(); ++j) x[j] += c[i] * p.gens[i][j];
    out.push_back(reduce(amb, x));
  });
  return out;
}

// ---------------------------------------------------------------------------

class FiniteQuadraticForm {
 public:
  FiniteQuadraticForm() : n_(1) {}

  /// `gram` holds q(e_i) on the diagonal and b(e_i, e_j) off it.
  FiniteQuadraticForm(std::vector<Int> orders, const RatMat& gram) {
    if (gram.rows() != orders.size() || !gram.is_symmetric())
      fail(ErrorKind::InvalidArgument, "form Gram must be symmetric and match the group");
    Int n = 1;
    for (std::size_t i = 0; i < gram.rows(); ++i)
      for (std::size_t j = 0; j < gram.cols(); ++j) n = lcm(n, denom(gram(i, j)));
    IntMat g(gram.rows(), gram.cols());
    for (std::size_t i = 0; i < gram.rows(); ++i)
      for (std::size_t j = 0; j < gram.cols(); ++j) g(i, j) = numer(gram(i, j) * Rat(n));
    *this = from_scaled(std::move(orders), n, std::move(g));
  }

  static FiniteQuadraticForm from_scaled(std::vector<Int> orders, Int n, IntMat g) {
    FiniteQuadraticForm f;
    if (n <= 0) fail(ErrorKind::InvalidArgument, "form denominator must be positive");
    if (g.rows() != orders.size() || !g.is_symmetric())
      fail(ErrorKind::InvalidArgument, "form Gram must be symmetric and match the group");
    // drop trivial factors
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (orders[i] < 1) fail(ErrorKind::InvalidArgument, "cyclic order must be positive");
      if (orders[i] > 1) keep.push_back(i);
    }
    IntMat gk(keep.size(), keep.size());
    std::vector<Int> ok;
    for (std::size_t a = 0; a < keep.size(); ++a) {
      ok.push_back(orders[keep[a]]);
      for (std::size_t b = 0; b < keep.size(); ++b) gk(a, b) = g(keep[a], keep[b]);
    }
    const std::size_t k = ok.size();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        gk(i, j) = mod_floor(gk(i, j), i == j ? Int(2 * n) : n);
        if ((ok[i] * gk(i, j)) % n != 0) fail(ErrorKind::InvalidArgument, "bilinear form not well defined on the group");
      }
    for (std::size_t i = 0; i < k; ++i)
      if ((ok[i] * ok[i] * gk(i, i)) % (2 * n) != 0)
        fail(ErrorKind::InvalidArgument, "quadratic form not well defined on the group");
    Int c = n;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) c = boost::multiprecision::gcd(c, gk(i, j));
    f.orders_ = std::move(ok);
    f.n_ = n / c;
    f.g_ = gk;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) f.g_(i, j) = gk(i, j) / c;
    return f;
  }

  const std::vector<Int>& orders() const { return orders_; }
  std::size_t rank() const { return orders_.size(); }
  Int order() const { return product(orders_); }
  const Int& denominator() const { return n_; }
  const IntMat& scaled_gram() const { return g_; }

  /// q(x) * N, in [0, 2N).
  Int q_scaled(const Elem& x) const {
    Int s = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (x[i] == 0) continue;
      Int row = 0;
      for (std::size_t j = 0; j < rank(); ++j) row += g_(i, j) * x[j];
      s += x[i] * row;
    }
    return mod_floor(s, 2 * n_);
  }
  /// b(x, y) * N, in [0, N).
  Int b_scaled(const Elem& x, const Elem& y) const {
    Int s = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < rank(); ++j) s += x[i] * g_(i, j) * y[j];
    }
    return mod_floor(s, n_);
  }
  Rat q(const Elem& x) const { return Rat(q_scaled(x), n_); }
  Rat b(const Elem& x, const Elem& y) const { return Rat(b_scaled(x, y), n_); }

  RatMat gram() const {
    RatMat m(rank(), rank());
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) m(i, j) = Rat(g_(i, j), n_);
    return m;
  }

  Elem zero() const { return Elem(rank()); }
  Elem reduce(const Elem& x) const { return enrinv::reduce(orders_, x); }

  FiniteQuadraticForm negated() const { return from_scaled(orders_, n_, g_.scaled(Int(-1))); }

  /// Form on the subgroup spanned by `rows` (each an element), generator Gram P G P^T.
  FiniteQuadraticForm pulled_back(const std::vector<Int>& new_orders, const std::vector<Elem>& rows) const {
    IntMat p(rows.size(), rank());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) p(i, j) = rows[i][j];
    return from_scaled(new_orders, n_, p * g_ * p.transpose());
  }

 private:
  std::vector<Int> orders_;
  Int n_;
  IntMat g_;
};

using FQF = FiniteQuadraticForm;

inline FQF direct_sum(const FQF& a, const FQF& b) {
  Int n = lcm(a.denominator(), b.denominator());
  IntMat g = block_diag(a.scaled_gram().scaled(n / a.denominator()), b.scaled_gram().scaled(n / b.denominator()));
  std::vector<Int> o = a.orders();
  o.insert(o.end(), b.orders().begin(), b.orders().end());
  return FQF::from_scaled(o, n, g);
}

inline FQF power(const FQF& a, std::size_t k) {
  FQF r;
  for (std::size_t i = 0; i < k; ++i) r = direct_sum(r, a);
  return r;
}

inline FQF restrict_form(const FQF& q, const Subgroup& h) {
  Presentation p = present(q.orders(), h);
  return q.pulled_back(p.orders, p.gens);
}

/// {x : b(x, h) = 0 for all h in H}.
inline Subgroup orthogonal_subgroup(const FQF& q, const Subgroup& h) {
  const std::size_t k = q.rank();
  const std::size_t m = h.gens.size();
  if (m == 0) return whole_group(q.orders());
  if (k == 0) return {};
  IntMat sys(k + m, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t a = 0; a < k; ++a) {
      Int s = 0;
      for (std::size_t c = 0; c < k; ++c) s += q.scaled_gram()(a, c) * h.gens[j][c];
      sys(a, j) = s;
    }
    sys(k + j, j) = q.denominator();
  }
  IntMat ker = kernel_basis(sys);
  return subgroup_from_lattice(q.orders(), ker.block(0, 0, ker.rows(), k));
}

inline Subgroup radical(const FQF& q) { return orthogonal_subgroup(q, whole_group(q.orders())); }

/// Elements of the radical on which q vanishes; q is additive on the radical.
inline Subgroup form_kernel(const FQF& q) {
  Subgroup r = radical(q);
  Presentation p = present(q.orders(), r);
  const std::size_t m = p.gens.size();
  if (m == 0) return {};
  IntMat sys(m + 1, 1);
  for (std::size_t i = 0; i < m; ++i) sys(i, 0) = q.q_scaled(p.gens[i]);
  sys(m, 0) = 2 * q.denominator();
  IntMat ker = kernel_basis(sys);
  Subgroup out;
  for (std::size_t i = 0; i < ker.rows(); ++i) {
    Elem x = q.zero();
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t c = 0; c < q.rank(); ++c) x[c] += ker(i, j) * p.gens[j][c];
    x = q.reduce(x);
    if (!is_zero(x)) out.gens.push_back(x);
  }
  return out;
}

inline bool is_isotropic(const FQF& q, const Subgroup& g) {
  for (std::size_t i = 0; i < g.gens.size(); ++i) {
    if (q.q_scaled(g.gens[i]) != 0) return false;
    for (std::size_t j = i + 1; j < g.gens.size(); ++j)
      if (q.b_scaled(g.gens[i], g.gens[j]) != 0) return false;
  }
  return true;
}

inline bool is_nondegenerate(const FQF& q) { return subgroup_order(q.orders(), radical(q)) == 1; }

/// Induced form on G^perp / G for an isotropic subgroup G.
inline FQF subquotient(const FQF& q, const Subgroup& g) {
  if (!is_isotropic(q, g)) fail(ErrorKind::NotIsotropic, "subquotient by a non-isotropic subgroup");
  Subgroup perp = orthogonal_subgroup(q, g);
  Presentation p = present_quotient(q.orders(), perp, g);
  return q.pulled_back(p.orders, p.gens);
}

// ---------------------------------------------------------------------------
// Small-integer element tables for enumeration-heavy algorithms.

struct ElementTable {
  std::vector<long long> orders;
  long long n = 1;  // form denominator
  std::size_t k = 0;
  std::size_t size = 1;
  std::vector<long long> coords;   // size * k, mixed radix, first coordinate fastest
  std::vector<long long> gx;       // size * k, (G x) mod n
  std::vector<long long> qv;       // q * n in [0, 2n)
  std::vector<long long> ord;      // element orders
  std::vector<std::size_t> stride;

  const long long* x(std::size_t i) const { return coords.data() + i * k; }

  long long b(std::size_t i, std::size_t j) const {
    long long s = 0;
    const long long* xi = x(i);
    const long long* gj = gx.data() + j * k;
    for (std::size_t a = 0; a < k; ++a) s = (s + xi[a] * gj[a]) % n;
    return s;
  }
  std::size_t index_of(const std::vector<long long>& c) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < k; ++a) idx += static_cast<std::size_t>(((c[a] % orders[a]) + orders[a]) % orders[a]) * stride[a];
    return idx;
  }
  std::size_t add(std::size_t i, std::size_t j) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < k; ++a) idx += static_cast<std::size_t>((x(i)[a] + x(j)[a]) % orders[a]) * stride[a];
    return idx;
  }
  std::size_t mul(std::size_t i, long long t) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < k; ++a) idx += static_cast<std::size_t>(((x(i)[a] * t) % orders[a] + orders[a]) % orders[a]) * stride[a];
    return idx;
  }
  Elem elem(std::size_t i) const {
    Elem e(k);
    for (std::size_t a = 0; a < k; ++a) e[a] = x(i)[a];
    return e;
  }
};

inline ElementTable element_table(const FQF& q, std::size_t limit) {
  if (q.order() > limit) fail(ErrorKind::ResourceLimit, "form too large to enumerate");
  if (q.denominator() > Int(1) << 30) fail(ErrorKind::ResourceLimit, "form denominator too large");
  ElementTable t;
  t.k = q.rank();
  t.n = to_ll(q.denominator());
  for (const auto& o : q.orders()) t.orders.push_back(to_ll(o));
  t.size = static_cast<std::size_t>(to_ll(q.order()));
  t.stride.resize(t.k);
  std::size_t s = 1;
  for (std::size_t a = 0; a < t.k; ++a) {
    t.stride[a] = s;
    s *= static_cast<std::size_t>(t.orders[a]);
  }
  std::vector<long long> g(t.k * t.k);
  for (std::size_t a = 0; a < t.k; ++a)
    for (std::size_t c = 0; c < t.k; ++c) g[a * t.k + c] = to_ll(q.scaled_gram()(a, c) % (2 * q.denominator()));
  t.coords.resize(t.size * t.k);
  t.gx.resize(t.size * t.k);
  t.qv.resize(t.size);
  t.ord.resize(t.size);
  for (std::size_t i = 0; i < t.size; ++i) {
    std::size_t r = i;
    long long o = 1;
    for (std::size_t a = 0; a < t.k; ++a) {
      long long c = static_cast<long long>(r % static_cast<std::size_t>(t.orders[a]));
      r /= static_cast<std::size_t>(t.orders[a]);
      t.coords[i * t.k + a] = c;
      long long oa = t.orders[a] / std::gcd(c, t.orders[a]);
      o = std::lcm(o, oa);
    }
    t.ord[i] = o;
    long long qq = 0;
    for (std::size_t a = 0; a < t.k; ++a) {
      long long row = 0;
      for (std::size_t c = 0; c < t.k; ++c) row = (row + g[a * t.k + c] * t.coords[i * t.k + c]) % (2 * t.n);
      t.gx[i * t.k + a] = row % t.n;
      qq = (qq + t.coords[i * t.k + a] * row) % (2 * t.n);
    }
    t.qv[i] = qq;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Isomorphism testing

/// Images of the generators of the source form.
struct FormIsomorphism {
  std::vector<Elem> images;
};

namespace detail {

struct Colouring {
  std::vector<std::size_t> c1, c2;
};

// Joint colour refinement on both element sets: colour = (order, q) refined by
// the multiset of (colour(y), b(x, y)).
inline Colouring refine_colours(const ElementTable& t1, const ElementTable& t2, long long nq, int rounds) {
  Colouring col;
  std::map<std::vector<long long>, std::size_t> ids;
  auto id_of = [&ids](const std::vector<long long>& key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::size_t id = ids.size();
    ids.emplace(key, id);
    return id;
  };
  long long s1 = nq / t1.n, s2 = nq / t2.n;
  for (std::size_t i = 0; i < t1.size; ++i) col.c1.push_back(id_of({0, t1.ord[i], t1.qv[i] * s1}));
  for (std::size_t i = 0; i < t2.size; ++i) col.c2.push_back(id_of({0, t2.ord[i], t2.qv[i] * s2}));
  for (int r = 1; r <= rounds; ++r) {
    auto step = [&](const ElementTable& t, const std::vector<std::size_t>& c, long long sc) {
      std::vector<std::size_t> out(t.size);
      std::vector<long long> keys(t.size);
      for (std::size_t i = 0; i < t.size; ++i) {
        for (std::size_t j = 0; j < t.size; ++j)
          keys[j] = static_cast<long long>(c[j]) * (4 * nq + 1) + t.b(i, j) * sc;
        std::sort(keys.begin(), keys.end());
        std::vector<long long> key{r, static_cast<long long>(c[i])};
        key.insert(key.end(), keys.begin(), keys.end());
        out[i] = id_of(key);
      }
      return out;
    };
    auto n1 = step(t1, col.c1, s1);
    auto n2 = step(t2, col.c2, s2);
    col.c1 = std::move(n1);
    col.c2 = std::move(n2);
  }
  return col;
}

inline std::vector<std::size_t> histogram(const std::vector<std::size_t>& c) {
  std::vector<std::size_t> h = c;
  std::sort(h.begin(), h.end());
  return h;
}

}  // namespace detail

inline constexpr std::size_t kIsomorphismLimit = 1u << 12;

inline std::optional<FormIsomorphism> is_isomorphic(const FQF& q1, const FQF& q2, std::size_t node_budget = 2000000) {
  if (q1.order() != q2.order()) return std::nullopt;
  if (normalized_orders(q1.orders()) != normalized_orders(q2.orders())) return std::nullopt;
  if (q1.order() > kIsomorphismLimit) fail(ErrorKind::ResourceLimit, "isomorphism test limited to 4096 elements");

  // work on invariant-factor generators of q1
  Presentation p1 = present(q1.orders(), whole_group(q1.orders()));
  FQF s1 = q1.pulled_back(p1.orders, p1.gens);
  ElementTable t1 = element_table(s1, kIsomorphismLimit);
  ElementTable t2 = element_table(q2, kIsomorphismLimit);
  const long long nq = std::lcm(t1.n, t2.n);
  const long long sc1 = nq / t1.n, sc2 = nq / t2.n;

  int rounds = t1.size <= 1024 ? 1 : 0;
  detail::Colouring col = detail::refine_colours(t1, t2, nq, rounds);
  if (detail::histogram(col.c1) != detail::histogram(col.c2)) return std::nullopt;

  const std::size_t k = t1.k;
  std::vector<std::size_t> gen_idx(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<long long> c(k, 0);
    c[i] = 1;
    gen_idx[i] = t1.index_of(c);
  }
  std::vector<std::vector<std::size_t>> cand(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t y = 0; y < t2.size; ++y)
      if (col.c2[y] == col.c1[gen_idx[i]]) cand[i].push_back(y);

  std::vector<std::size_t> img(k);
  std::size_t nodes = 0;
  // span[d] = elements generated by the first d images
  std::vector<std::vector<char>> span(k + 1, std::vector<char>(t2.size, 0));
  std::vector<std::vector<std::size_t>> span_list(k + 1);
  span[0][0] = 1;
  span_list[0] = {0};

  std::function<bool(std::size_t)> dfs = [&](std::size_t d) -> bool {
    if (d == k) return true;
    const long long od = t1.orders[d];
    for (std::size_t y : cand[d]) {
      if (++nodes > node_budget) fail(ErrorKind::ResourceLimit, "isomorphism search exceeded node budget");
      if (t2.ord[y] != od) continue;
      bool ok = true;
      for (std::size_t j = 0; j < d && ok; ++j)
        if (t2.b(y, img[j]) * sc2 != t1.b(gen_idx[d], gen_idx[j]) * sc1) ok = false;
      if (!ok) continue;
      for (long long t = 1; t < od && ok; ++t)
        if (span[d][t2.mul(y, t)]) ok = false;
      if (!ok) continue;
      img[d] = y;
      auto& sp = span[d + 1];
      std::fill(sp.begin(), sp.end(), 0);
      span_list[d + 1].clear();
      for (std::size_t s : span_list[d]) {
        std::size_t cur = s;
        for (long long t = 0; t < od; ++t) {
          sp[cur] = 1;
          span_list[d + 1].push_back(cur);
          cur = t2.add(cur, y);
        }
      }
      if (dfs(d + 1)) return true;
    }
    return false;
  };
  if (!dfs(0)) return std::nullopt;

  // images of q1's own generators: coordinates in the invariant-factor basis
  FormIsomorphism iso;
  for (std::size_t a = 0; a < q1.rank(); ++a) {
    Elem e = q1.zero();
    e[a] = 1;
    Elem c = p1.coords(e);
    Elem y = q2.zero();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < q2.rank(); ++j) y[j] += c[i] * Int(t2.x(img[i])[j]);
    iso.images.push_back(q2.reduce(y));
  }
  // full check on every element
  bool good = true;
  for_each_element(q1.orders(), [&](const Elem& x) {
    if (!good) return;
    Elem y = q2.zero();
    for (std::size_t a = 0; a < q1.rank(); ++a)
      for (std::size_t j = 0; j < q2.rank(); ++j) y[j] += x[a] * iso.images[a][j];
    if (q1.q(x) != q2.q(q2.reduce(y))) good = false;
  });
  if (!good) fail(ErrorKind::InvalidArgument, "internal: isomorphism check failed");
  return iso;
}

// ---------------------------------------------------------------------------
// Descriptor

struct FormDescriptor {
  std::vector<Int> invariant_factors;
  std::size_t dim = 0;
  std::size_t radical_dim = 0;
  bool radical_q_nonzero = false;
  std::optional<int> arf;  ///< 2-elementary forms with integral values only
  /// q-value histogram over all elements; present when arf is undefined.
  std::optional<std::vector<std::pair<Rat, Int>>> order4_part;

  friend bool operator==(const FormDescriptor& a, const FormDescriptor& b) {
    return a.invariant_factors == b.invariant_factors && a.dim == b.dim && a.radical_dim == b.radical_dim &&
           a.radical_q_nonzero == b.radical_q_nonzero && a.arf == b.arf && a.order4_part == b.order4_part;
  }
  friend bool operator!=(const FormDescriptor& a, const FormDescriptor& b) { return !(a == b); }
  friend bool operator<(const FormDescriptor& a, const FormDescriptor& b) {
    auto key = [](const FormDescriptor& d) {
      return std::make_tuple(d.dim, d.radical_dim, d.radical_q_nonzero, d.arf.value_or(-1), d.invariant_factors);
    };
    if (key(a) != key(b)) return key(a) < key(b);
    return a.order4_part.value_or(std::vector<std::pair<Rat, Int>>{}) <
           b.order4_part.value_or(std::vector<std::pair<Rat, Int>>{});
  }
};

inline FormDescriptor descriptor(const FQF& q) {
  FormDescriptor d;
  d.invariant_factors = normalized_orders(q.orders());
  for (const auto& f : d.invariant_factors)
    if (f != 2 && f != 4) fail(ErrorKind::UnsupportedExponent, "descriptor needs a 2-group of exponent at most 4");
  d.dim = d.invariant_factors.size();
  Subgroup rad = radical(q);
  d.radical_dim = min_generators(present(q.orders(), rad).orders);
  d.radical_q_nonzero = std::any_of(rad.gens.begin(), rad.gens.end(), [&](const Elem& g) { return q.q_scaled(g) != 0; });

  bool two_elementary = std::all_of(d.invariant_factors.begin(), d.invariant_factors.end(), [](const Int& f) { return f == 2; });
  ElementTable t = element_table(q, 1u << 22);
  bool integral = true;
  for (std::size_t i = 0; i < t.size; ++i)
    if (t.qv[i] % t.n != 0) integral = false;
  if (two_elementary && integral) {
    if (d.radical_q_nonzero) {
      d.arf = 0;  // u^k + w = v + u^(k-1) + w
    } else {
      // zeros on A/R: 2^(2m-1) + 2^(m-1) for Arf 0, 2^(2m-1) - 2^(m-1) for Arf 1
      std::size_t zeros = 0;
      for (std::size_t i = 0; i < t.size; ++i)
        if (t.qv[i] == 0) ++zeros;
      std::size_t quot = zeros >> d.radical_dim;
      std::size_t m = (d.dim - d.radical_dim) / 2;
      std::size_t half = m == 0 ? 0 : (std::size_t{1} << (2 * m - 1));
      d.arf = (m == 0 || quot > half) ? 0 : 1;
    }
  } else {
    std::map<Rat, Int> h;
    for (std::size_t i = 0; i < t.size; ++i) h[Rat(t.qv[i], t.n)] += 1;
    d.order4_part = std::vector<std::pair<Rat, Int>>(h.begin(), h.end());
  }
  return d;
}

// ---------------------------------------------------------------------------
// Gauss sums

/// k with sum_x exp(pi i q(x)) = sqrt|A| * exp(2 pi i k / 8), for a
/// nondegenerate form on a 2-group.
inline int gauss_signature(const FQF& q) {
  if (!is_nondegenerate(q)) fail(ErrorKind::DegenerateForm, "Gauss sum of a degenerate form");
  Int n = q.denominator();
  Int m = 2 * n;
  while (m % 2 == 0) m /= 2;
  if (m != 1) fail(ErrorKind::UnsupportedExponent, "Gauss signature implemented for 2-groups only");
  if (q.order() == 1) return 0;
  // work in Z[zeta_M], M = max(2N, 8), basis zeta^0..zeta^(M/2-1), zeta^(M/2) = -1
  long long big_m = std::max<long long>(to_ll(2 * n), 8);
  long long half = big_m / 2;
  long long step = big_m / to_ll(2 * n);
  ElementTable t = element_table(q, 1u << 22);
  std::vector<long long> sum(static_cast<std::size_t>(half), 0);
  auto add_power = [&](std::vector<long long>& v, long long e, long long c) {
    e %= big_m;
    if (e < 0) e += big_m;
    if (e >= half) v[static_cast<std::size_t>(e - half)] -= c;
    else v[static_cast<std::size_t>(e)] += c;
  };
  for (std::size_t i = 0; i < t.size; ++i) add_power(sum, t.qv[i] * step, 1);
  // sqrt|A| = 2^(a/2) or 2^((a-1)/2) * (zeta_8 - zeta_8^3)
  long long a = 0;
  for (std::size_t s = t.size; s > 1; s >>= 1) ++a;
  long long c = 1LL << (a / 2);
  long long z8 = big_m / 8;
  for (int k = 0; k < 8; ++k) {
    std::vector<long long> target(static_cast<std::size_t>(half), 0);
    if (a % 2 == 0) {
      add_power(target, k * z8, c);
    } else {
      add_power(target, (k + 1) * z8, c);
      add_power(target, (k + 3) * z8, -c);
    }
    if (target == sum) return k;
  }
  fail(ErrorKind::DegenerateForm, "Gauss sum is not of the expected shape");
}

// ---------------------------------------------------------------------------
// Standard forms and labels

/// <a/n>: Z/n with q(generator) = a/n.
inline FQF cyclic_form(const Int& a, const Int& n) {
  RatMat g(1, 1);
  g(0, 0) = mod_floor(Rat(a, n), Int(2));
  return FQF({n}, g);
}

inline FQF standard_form(const std::string& name) {
  auto mk = [](std::vector<Int> o, RatMat g) { return FQF(std::move(o), g); };
  if (name == "u") return mk({2, 2}, RatMat{{Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(0)}});
  if (name == "v") return mk({2, 2}, RatMat{{Rat(1), Rat(1, 2)}, {Rat(1, 2), Rat(1)}});
  if (name == "w") return mk({2}, RatMat{{Rat(1)}});
  if (name == "z") return mk({2}, RatMat{{Rat(0)}});
  if (name == "v(4)") return mk({4, 4}, RatMat{{Rat(1, 2), Rat(1, 4)}, {Rat(1, 4), Rat(1, 2)}});
  if (name.size() >= 5 && name.front() == '<' && name.back() == '>') {
    std::string body = name.substr(1, name.size() - 2);
    auto slash = body.find('/');
    try {
      if (slash != std::string::npos) {
        Int a(body.substr(0, slash)), n(body.substr(slash + 1));
        if (n >= 2) return cyclic_form(a, n);
      }
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::UnknownName, "unknown finite quadratic form '" + name + "'");
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Parses labels such as "u3+w", "u^2+<-1/4>^3", "v+v(4)", "trivial".
/// A bare trailing digit run on u, v, w, z is read as an exponent.
inline FQF parse_form_label(const std::string& label) {
  std::string s = trim(label);
  if (s.empty() || s == "trivial" || s == "0" || s == "---" || s == "-") return FQF();
  FQF out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    // split at top-level '+'
    std::size_t next = pos;
    int depth = 0;
    while (next < s.size()) {
      char c = s[next];
      if (c == '<' || c == '(') ++depth;
      if (c == '>' || c == ')') --depth;
      if (c == '+' && depth == 0) break;
      ++next;
    }
    std::string term = trim(s.substr(pos, next - pos));
    if (term.empty()) fail(ErrorKind::Parse, "empty term in form label '" + label + "'");
    std::string base = term;
    std::size_t exp = 1;
    auto caret = term.rfind('^');
    if (caret != std::string::npos && term.find('>', caret) == std::string::npos &&
        term.find(')', caret) == std::string::npos) {
      base = trim(term.substr(0, caret));
      try {
        exp = std::stoul(term.substr(caret + 1));
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, "bad exponent in '" + term + "'");
      }
    } else if (term.size() >= 2 && std::string("uvwz").find(term[0]) != std::string::npos &&
               std::all_of(term.begin() + 1, term.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      base = term.substr(0, 1);
      exp = std::stoul(term.substr(1));
    }
    FQF f;
    try {
      f = standard_form(base);
    } catch (const Error& e) {
      fail(ErrorKind::Parse, "unknown term '" + base + "' in form label '" + label + "'");
    }
    out = direct_sum(out, power(f, exp));
    if (next >= s.size()) break;
    pos = next + 1;
  }
  return out;
}

namespace detail {

inline std::string power_label(const std::string& base, std::size_t k) {
  if (k == 0) return "";
  return k == 1 ? base : base + "^" + std::to_string(k);
}

inline std::string join_terms(const std::vector<std::string>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (t.empty()) continue;
    if (!out.empty()) out += " + ";
    out += t;
  }
  return out.empty() ? "trivial" : out;
}

}  // namespace detail

/// Human-readable label. 2-elementary integral forms use the descriptor
/// (u^a + v + w^r or z^r); others are matched against short sums of
/// standard pieces, with a generic fallback.
inline std::string form_label(const FQF& q) {
  if (q.order() == 1) return "trivial";
  std::optional<FormDescriptor> d;
  try {
    d = descriptor(q);
  } catch (const Error&) {
  }
  if (d && d->arf) {
    std::size_t m = (d->dim - d->radical_dim) / 2;
    std::vector<std::string> t;
    if (*d->arf == 0) t.push_back(detail::power_label("u", m));
    else {
      t.push_back(detail::power_label("u", m - 1));
      t.push_back("v");
    }
    t.push_back(detail::power_label(d->radical_q_nonzero ? "w" : "z", d->radical_dim));
    return detail::join_terms(t);
  }
  if (d && q.order() <= kIsomorphismLimit) {
    // search u^a + v^e + <c/2>... + <c/4>... + v(4)^f over the right group shape
    std::size_t n2 = 0, n4 = 0;
    for (const auto& f : d->invariant_factors) (f == 2 ? n2 : n4) += 1;
    static const std::vector<std::string> cyc2 = {"<1/2>", "<-1/2>"};
    static const std::vector<std::string> cyc4 = {"<1/4>", "<-1/4>", "<3/4>", "<-3/4>"};
    std::vector<std::string> best;
    for (std::size_t f4 = 0; 2 * f4 <= n4; ++f4) {
      std::size_t c4 = n4 - 2 * f4;
      // multisets of cyc4 of size c4
      std::vector<std::vector<std::size_t>> ms4;
      std::function<void(std::size_t, std::size_t, std::vector<std::size_t>&)> gen4 =
          [&](std::size_t start, std::size_t left, std::vector<std::size_t>& cur) {
            if (left == 0) {
              ms4.push_back(cur);
              return;
            }
            for (std::size_t i = start; i < cyc4.size(); ++i) {
              cur[i]++;
              gen4(i, left - 1, cur);
              cur[i]--;
            }
          };
      std::vector<std::size_t> cur4(cyc4.size(), 0);
      gen4(0, c4, cur4);
      for (std::size_t c2 = 0; c2 <= std::min<std::size_t>(n2, 2); ++c2) {
        if ((n2 - c2) % 2 != 0) continue;
        std::size_t pairs = (n2 - c2) / 2;
        for (std::size_t ev = 0; ev <= std::min<std::size_t>(pairs, 1); ++ev) {
          for (std::size_t p2 = 0; p2 <= c2; ++p2) {
            for (const auto& m4 : ms4) {
              std::vector<std::string> terms;
              terms.push_back(detail::power_label("u", pairs - ev));
              terms.push_back(detail::power_label("v", ev));
              terms.push_back(detail::power_label(cyc2[0], p2));
              terms.push_back(detail::power_label(cyc2[1], c2 - p2));
              for (std::size_t i = 0; i < cyc4.size(); ++i) terms.push_back(detail::power_label(cyc4[i], m4[i]));
              terms.push_back(detail::power_label("v(4)", f4));
              std::string lab = detail::join_terms(terms);
              FQF cand = parse_form_label(lab == "trivial" ? "" : lab);
              if (descriptor(cand) != *d) continue;
              if (is_isomorphic(cand, q)) return lab;
            }
          }
        }
      }
    }
  }
  std::ostringstream os;
  os << "form(orders=[";
  for (std::size_t i = 0; i < q.rank(); ++i) os << (i ? "," : "") << q.orders()[i];
  os << "], gram=" << q.gram() << ")";
  return os.str();
}

}  // namespace enrinv
