#pragma once

// Even integral lattices, sublattice calculus, discriminant forms,
// overlattices, short vectors, definite isometry and involutions.

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "enrinv/exactnum.hpp"
#include "enrinv/finform.hpp"

namespace enrinv {

class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(IntMat gram, std::string name = "") : gram_(std::move(gram)), name_(std::move(name)) {
    if (!gram_.is_symmetric()) fail(ErrorKind::InvalidArgument, "lattice Gram matrix must be square and symmetric");
    if (determinant(gram_) == 0) fail(ErrorKind::DegenerateForm, "lattice Gram matrix is degenerate");
  }

  const IntMat& gram() const { return gram_; }
  const std::string& name() const { return name_; }
  std::size_t rank() const { return gram_.rows(); }
  Int det() const { return determinant(gram_); }
  std::pair<std::size_t, std::size_t> signature() const { return enrinv::signature(gram_); }

  bool is_even() const {
    for (std::size_t i = 0; i < rank(); ++i)
      if (gram_(i, i) % 2 != 0) return false;
    return true;
  }

  Lattice scaled(const Int& m, std::string name = "") const { return Lattice(gram_.scaled(m), std::move(name)); }
  Lattice renamed(std::string name) const {
    Lattice l = *this;
    l.name_ = std::move(name);
    return l;
  }

  Int inner(const std::vector<Int>& x, const std::vector<Int>& y) const {
    Int s = 0;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) s += x[i] * gram_(i, j) * y[j];
    return s;
  }

 private:
  IntMat gram_;
  std::string name_;
};

inline Lattice direct_sum(const Lattice& a, const Lattice& b, std::string name = "") {
  return Lattice(block_diag(a.gram(), b.gram()), std::move(name));
}

// ---------------------------------------------------------------------------
// Named lattices

inline IntMat cartan_a(std::size_t l) {
  IntMat c(l, l);
  for (std::size_t i = 0; i < l; ++i) {
    c(i, i) = 2;
    if (i + 1 < l) c(i, i + 1) = c(i + 1, i) = -1;
  }
  return c;
}

/// Bourbaki ordering: chain 1..m-2, nodes m-1 and m both attached to m-2.
inline IntMat cartan_d(std::size_t m) {
  IntMat c(m, m);
  for (std::size_t i = 0; i < m; ++i) c(i, i) = 2;
  for (std::size_t i = 0; i + 2 < m - 1; ++i) c(i, i + 1) = c(i + 1, i) = -1;
  c(m - 3, m - 2) = c(m - 2, m - 3) = -1;
  c(m - 3, m - 1) = c(m - 1, m - 3) = -1;
  return c;
}

/// Bourbaki ordering: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
inline IntMat cartan_e(std::size_t n) {
  IntMat c(n, n);
  for (std::size_t i = 0; i < n; ++i) c(i, i) = 2;
  auto link = [&c](std::size_t a, std::size_t b) { c(a - 1, b - 1) = c(b - 1, a - 1) = -1; };
  link(1, 3);
  link(2, 4);
  link(3, 4);
  for (std::size_t k = 4; k < n; ++k) link(k, k + 1);
  return c;
}

namespace detail {

inline Lattice named_atom(const std::string& atom) {
  if (atom == "{0}" || atom == "0") return Lattice(IntMat(0, 0), "{0}");
  if (atom == "U") return Lattice(IntMat{{0, 1}, {1, 0}}, "U");
  if (atom.size() >= 3 && atom.front() == '<' && atom.back() == '>') {
    try {
      Int n(atom.substr(1, atom.size() - 2));
      if (n != 0) return Lattice(IntMat{{n}}, atom);
    } catch (const std::exception&) {
    }
    fail(ErrorKind::UnknownName, "bad rank-one lattice '" + atom + "'");
  }
  if (atom.size() >= 2 && (atom[0] == 'A' || atom[0] == 'D' || atom[0] == 'E')) {
    std::string digits = atom.substr(atom[1] == '_' ? 2 : 1);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      std::size_t n = std::stoul(digits);
      std::string canon = std::string(1, atom[0]) + digits;
      if (atom[0] == 'A' && n >= 1) return Lattice(cartan_a(n).scaled(Int(-1)), canon);
      if (atom[0] == 'D' && n >= 4) return Lattice(cartan_d(n).scaled(Int(-1)), canon);
      if (atom[0] == 'E' && n >= 6 && n <= 8) return Lattice(cartan_e(n).scaled(Int(-1)), canon);
    }
  }
  fail(ErrorKind::UnknownName, "unknown lattice '" + atom + "'");
}

}  // namespace detail

/// Parses names such as "U", "U(2)", "<-4>", "A1", "D_4(2)", "E8(2)",
/// "A1(2)^4", "U+U(2)+E8(2)", "{0}". Root lattices are negative definite.
inline Lattice make_named(const std::string& label) {
  std::string s;
  for (std::size_t i = 0; i < label.size();) {
    if (label.compare(i, 3, "\xE2\x8A\x95") == 0) {  // U+2295 direct sum sign
      s += '+';
      i += 3;
    } else if (!std::isspace(static_cast<unsigned char>(label[i]))) {
      s += label[i++];
    } else {
      ++i;
    }
  }
  if (s.empty()) fail(ErrorKind::UnknownName, "empty lattice name");
  IntMat g(0, 0);
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = pos;
    int depth = 0;
    while (next < s.size()) {
      char c = s[next];
      if (c == '<' || c == '(' || c == '{') ++depth;
      if (c == '>' || c == ')' || c == '}') --depth;
      if (c == '+' && depth == 0 && !(next > pos && s[next - 1] == '<')) break;
      ++next;
    }
    std::string term = s.substr(pos, next - pos);
    if (term.empty()) fail(ErrorKind::UnknownName, "empty term in lattice name '" + label + "'");
    std::size_t exp = 1;
    auto caret = term.rfind('^');
    if (caret != std::string::npos && term.find_first_of(")>}", caret) == std::string::npos) {
      try {
        exp = std::stoul(term.substr(caret + 1));
      } catch (const std::exception&) {
        fail(ErrorKind::UnknownName, "bad exponent in '" + term + "'");
      }
      term = term.substr(0, caret);
    }
    Int scale = 1;
    if (!term.empty() && term.back() == ')') {
      auto open = term.rfind('(');
      if (open == std::string::npos || open == 0) fail(ErrorKind::UnknownName, "bad scaling in '" + term + "'");
      try {
        scale = Int(term.substr(open + 1, term.size() - open - 2));
      } catch (const std::exception&) {
        fail(ErrorKind::UnknownName, "bad scaling in '" + term + "'");
      }
      if (scale == 0) fail(ErrorKind::UnknownName, "zero scaling in '" + term + "'");
      term = term.substr(0, open);
    }
    Lattice atom = detail::named_atom(term);
    IntMat ag = atom.gram().scaled(scale);
    for (std::size_t k = 0; k < exp; ++k) g = block_diag(g, ag);
    if (next >= s.size()) break;
    pos = next + 1;
  }
  return Lattice(g, label);
}

// ---------------------------------------------------------------------------
// Sublattices

struct Sublattice {
  Lattice ambient;
  IntMat basis;  ///< rows in ambient coordinates

  Sublattice() = default;
  Sublattice(Lattice amb, IntMat b) : ambient(std::move(amb)), basis(std::move(b)) {
    if (basis.cols() != ambient.rank()) fail(ErrorKind::InvalidArgument, "sublattice basis has wrong width");
    if (enrinv::rank(basis) != basis.rows()) fail(ErrorKind::DependentRows, "sublattice basis rows are dependent");
  }

  std::size_t rank() const { return basis.rows(); }
  IntMat gram() const { return basis * ambient.gram() * basis.transpose(); }
  Lattice lattice(std::string name = "") const { return Lattice(gram(), std::move(name)); }
};

inline Sublattice orthogonal_complement(const Sublattice& s) {
  const std::size_t n = s.ambient.rank();
  if (s.rank() == 0) return Sublattice(s.ambient, IntMat::identity(n));
  IntMat m = (s.basis * s.ambient.gram()).transpose();  // n x k
  return Sublattice(s.ambient, kernel_basis(m));
}

inline Sublattice primitive_closure(const Sublattice& s) {
  return Sublattice(s.ambient, saturate(s.basis, s.ambient.rank()));
}

// ---------------------------------------------------------------------------
// Discriminant groups

/// A_L = L^*/L via the Smith form U G V = D: the class of a dual vector x is
/// (U G x)_i mod d_i and generator i lifts to V[:, i] / d_i.
struct DiscriminantGroup {
  Lattice lattice;
  std::vector<Int> orders;
  std::vector<std::vector<Rat>> lifts;  ///< coordinates in the lattice basis
  IntMat u;
  std::vector<Int> diag;
  std::vector<std::size_t> index;  ///< positions with d_i > 1

  Elem class_of(const std::vector<Rat>& x) const {
    const IntMat& g = lattice.gram();
    std::vector<Int> y(g.rows());
    for (std::size_t i = 0; i < g.rows(); ++i) {
      Rat s = 0;
      for (std::size_t j = 0; j < g.cols(); ++j) s += Rat(g(i, j)) * x[j];
      if (!is_integral(s)) fail(ErrorKind::InvalidArgument, "vector is not in the dual lattice");
      y[i] = numer(s);
    }
    std::vector<Int> c = times_col(u, y);
    Elem out(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) out[i] = mod_floor(c[index[i]], diag[index[i]]);
    return out;
  }

  /// Rational lift of an element.
  std::vector<Rat> lift(const Elem& e) const {
    std::vector<Rat> v(lattice.rank());
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += Rat(e[i]) * lifts[i][j];
    return v;
  }
};

inline DiscriminantGroup discriminant_group(const Lattice& l) {
  DiscriminantGroup a;
  a.lattice = l;
  SmithForm s = smith_normal_form(l.gram());
  a.u = s.U;
  for (std::size_t i = 0; i < l.rank(); ++i) {
    a.diag.push_back(s.D(i, i));
    if (s.D(i, i) > 1) {
      a.index.push_back(i);
      a.orders.push_back(s.D(i, i));
      std::vector<Rat> lift(l.rank());
      for (std::size_t j = 0; j < l.rank(); ++j) lift[j] = Rat(s.V(j, i), s.D(i, i));
      a.lifts.push_back(lift);
    }
  }
  return a;
}

/// A_{L+M} = A_L + A_M with block coordinates: elements are the concatenation
/// of an A_L element and an A_M element.
inline DiscriminantGroup direct_sum(const DiscriminantGroup& a, const DiscriminantGroup& b) {
  DiscriminantGroup s;
  const std::size_t na = a.lattice.rank(), nb = b.lattice.rank();
  s.lattice = direct_sum(a.lattice, b.lattice);
  s.orders = a.orders;
  s.orders.insert(s.orders.end(), b.orders.begin(), b.orders.end());
  for (const auto& l : a.lifts) {
    auto v = l;
    v.resize(na + nb);
    s.lifts.push_back(v);
  }
  for (const auto& l : b.lifts) {
    std::vector<Rat> v(na);
    v.insert(v.end(), l.begin(), l.end());
    s.lifts.push_back(v);
  }
  s.u = block_diag(a.u, b.u);
  s.diag = a.diag;
  s.diag.insert(s.diag.end(), b.diag.begin(), b.diag.end());
  s.index = a.index;
  for (auto i : b.index) s.index.push_back(na + i);
  return s;
}

inline Rat rational_inner(const IntMat& g, const std::vector<Rat>& x, const std::vector<Rat>& y) {
  Rat s = 0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < g.cols(); ++j) s += x[i] * Rat(g(i, j)) * y[j];
  }
  return s;
}

inline FQF discriminant_form(const DiscriminantGroup& a) {
  if (!a.lattice.is_even()) fail(ErrorKind::OddLattice, "discriminant form needs an even lattice");
  const std::size_t k = a.orders.size();
  RatMat m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      Rat v = rational_inner(a.lattice.gram(), a.lifts[i], a.lifts[j]);
      m(i, j) = i == j ? mod_floor(v, Int(2)) : mod_floor(v, Int(1));
    }
  return FQF(a.orders, m);
}

inline FQF discriminant_form(const Lattice& l) { return discriminant_form(discriminant_group(l)); }

struct TwoElemInvariants {
  std::size_t r = 0;
  std::size_t l = 0;
  int delta = 0;

  friend bool operator==(const TwoElemInvariants& a, const TwoElemInvariants& b) {
    return a.r == b.r && a.l == b.l && a.delta == b.delta;
  }
  friend bool operator!=(const TwoElemInvariants& a, const TwoElemInvariants& b) { return !(a == b); }
  std::string str() const {
    return "(" + std::to_string(r) + "," + std::to_string(l) + "," + std::to_string(delta) + ")";
  }
};

inline TwoElemInvariants two_elementary_invariants(const Lattice& lat) {
  DiscriminantGroup a = discriminant_group(lat);
  for (const auto& d : a.orders)
    if (d != 2) fail(ErrorKind::NotTwoElementary, "discriminant group is not 2-elementary");
  FQF q = discriminant_form(a);
  TwoElemInvariants t;
  t.r = lat.rank();
  t.l = a.orders.size();
  // for a 2-elementary group 2b is integral, so integrality of q on generators suffices
  for (std::size_t i = 0; i < q.rank(); ++i) {
    Elem e = q.zero();
    e[i] = 1;
    if (q.q_scaled(e) % q.denominator() != 0) t.delta = 1;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Glue groups and overlattices

/// Gamma_ST = (S + T)^/(S + T) as a subgroup of A_S + A_T (orders concatenated).
struct GlueGroup {
  DiscriminantGroup as, at;
  std::vector<Int> orders;  ///< orders of A_S followed by A_T
  Subgroup gamma;
  Subgroup proj_s, proj_t;
};

inline GlueGroup glue_group(const Sublattice& s, const Sublattice& t) {
  const IntMat& g = s.ambient.gram();
  if (s.rank() > 0 && t.rank() > 0 && !(s.basis * g * t.basis.transpose()).is_zero())
    fail(ErrorKind::NotOrthogonal, "glue group needs orthogonal sublattices");
  GlueGroup out;
  out.as = discriminant_group(s.lattice());
  out.at = discriminant_group(t.lattice());
  out.orders = out.as.orders;
  out.orders.insert(out.orders.end(), out.at.orders.begin(), out.at.orders.end());
  IntMat both = vstack(s.basis, t.basis);
  if (both.rows() == 0) return out;
  IntMat closure = saturate(both, s.ambient.rank());
  // express closure rows in the combined basis: c = coeff * both
  RatMat bt = to_rat(both);
  RatMat sq = bt * bt.transpose();
  RatMat coeff = to_rat(closure) * bt.transpose() * inverse(sq);
  for (std::size_t i = 0; i < closure.rows(); ++i) {
    std::vector<Rat> a(s.rank()), c(t.rank());
    for (std::size_t j = 0; j < s.rank(); ++j) a[j] = coeff(i, j);
    for (std::size_t j = 0; j < t.rank(); ++j) c[j] = coeff(i, s.rank() + j);
    Elem es = out.as.class_of(a), et = out.at.class_of(c);
    Elem e = es;
    e.insert(e.end(), et.begin(), et.end());
    if (!is_zero(e)) out.gamma.gens.push_back(e);
    if (!is_zero(es)) out.proj_s.gens.push_back(es);
    if (!is_zero(et)) out.proj_t.gens.push_back(et);
  }
  return out;
}

struct Overlattice {
  Lattice lattice;
  RatMat basis;  ///< rows in coordinates of the original lattice
};

/// The overlattice generated by M and lifts of an isotropic subgroup of A_M.
inline Overlattice overlattice_from_glue(const DiscriminantGroup& a, const Subgroup& h) {
  const Lattice& m = a.lattice;
  const std::size_t n = m.rank();
  if (!h.gens.empty()) {
    if (!m.is_even()) fail(ErrorKind::OddLattice, "overlattice construction needs an even lattice");
    FQF q = discriminant_form(a);
    if (!is_isotropic(q, h)) fail(ErrorKind::NotIsotropic, "glue subgroup is not isotropic");
  }
  std::vector<std::vector<Rat>> rows;
  for (const auto& g : h.gens) rows.push_back(a.lift(reduce(a.orders, g)));
  Int den = 1;
  for (const auto& r : rows)
    for (const auto& x : r) den = lcm(den, denom(x));
  IntMat gen(n + rows.size(), n);
  for (std::size_t i = 0; i < n; ++i) gen(i, i) = den;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) gen(n + i, j) = numer(rows[i][j] * Rat(den));
  IntMat hb = hermite_normal_form(gen);
  RatMat basis(hb.rows(), n);
  for (std::size_t i = 0; i < hb.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) basis(i, j) = Rat(hb(i, j), den);
  RatMat gram = basis * to_rat(m.gram()) * basis.transpose();
  auto gi = to_int(gram);
  if (!gi) fail(ErrorKind::NotIsotropic, "overlattice is not integral");
  Lattice out(*gi);
  if (m.is_even() && !out.is_even()) fail(ErrorKind::NotIsotropic, "overlattice is not even");
  return {out, basis};
}

inline Overlattice overlattice_from_glue(const Lattice& m, const Subgroup& h) {
  return overlattice_from_glue(discriminant_group(m), h);
}

// ---------------------------------------------------------------------------
// Short vectors

namespace detail {

/// +1 for positive definite, -1 for negative definite.
inline int definite_sign(const Lattice& l) {
  if (l.rank() == 0) return 1;
  auto [p, n] = l.signature();
  if (n == 0) return 1;
  if (p == 0) return -1;
  fail(ErrorKind::IndefiniteLattice, "lattice is indefinite");
}

/// All x with x^T A x <= bound for positive definite A, excluding 0, up to sign.
inline void enumerate_up_to(const IntMat& a, const Int& bound, const std::function<void(const std::vector<Int>&, const Int&)>& f) {
  const std::size_t n = a.rows();
  if (n == 0 || bound <= 0) return;
  // Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
  RatMat q = to_rat(a);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      q(j, i) = q(i, j);
      q(i, j) = q(i, j) / q(i, i);
    }
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) q(k, l) -= q(k, i) * q(i, l);
  }
  std::vector<Int> x(n);
  std::function<void(std::size_t, const Rat&)> rec = [&](std::size_t i1, const Rat& remaining) {
    const std::size_t i = i1 - 1;
    Rat c = 0;
    for (std::size_t j = i + 1; j < n; ++j) c -= q(i, j) * Rat(x[j]);
    Rat r = remaining / q(i, i);
    auto visit = [&](const Int& xi) {
      Rat d = Rat(xi) - c;
      Rat used = q(i, i) * d * d;
      x[i] = xi;
      if (i == 0) {
        bool nonzero = false, positive = false;
        for (std::size_t t = n; t-- > 0;)
          if (x[t] != 0) {
            nonzero = true;
            positive = x[t] > 0;
            break;
          }
        // canonical sign: last nonzero coordinate positive during the walk; re-signed below
        if (nonzero && positive) {
          Rat norm = Rat(bound) - (remaining - used);
          f(x, numer(norm));
        }
      } else {
        rec(i, remaining - used);
      }
    };
    Int lo = floor(c);
    for (Int xi = lo;; --xi) {
      Rat d = Rat(xi) - c;
      if (d * d > r) break;
      visit(xi);
    }
    for (Int xi = lo + 1;; ++xi) {
      Rat d = Rat(xi) - c;
      if (d * d > r) break;
      visit(xi);
    }
  };
  rec(n, Rat(bound));
  x.assign(n, 0);
}

inline void canonical_sign(std::vector<Int>& v) {
  for (const auto& c : v)
    if (c != 0) {
      if (c < 0)
        for (auto& t : v) t = -t;
      return;
    }
}

}  // namespace detail

/// All v with (v, v) = norm up to sign (first nonzero coordinate positive),
/// sorted lexicographically.
inline std::vector<std::vector<Int>> short_vectors(const Lattice& l, const Int& norm) {
  int sign = detail::definite_sign(l);
  IntMat a = sign > 0 ? l.gram() : l.gram().scaled(Int(-1));
  Int target = sign > 0 ? norm : Int(-norm);
  std::vector<std::vector<Int>> out;
  if (target <= 0) return out;
  detail::enumerate_up_to(a, target, [&](const std::vector<Int>& x, const Int& nv) {
    if (nv == target) {
      std::vector<Int> v = x;
      detail::canonical_sign(v);
      out.push_back(v);
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

/// Vector counts (up to sign) for |norm| = 1..max_abs_norm in the lattice's own sign.
inline std::vector<std::size_t> short_vector_counts(const Lattice& l, const Int& max_abs_norm) {
  int sign = detail::definite_sign(l);
  IntMat a = sign > 0 ? l.gram() : l.gram().scaled(Int(-1));
  std::vector<std::size_t> counts(static_cast<std::size_t>(to_ll(max_abs_norm)) + 1, 0);
  detail::enumerate_up_to(a, max_abs_norm, [&](const std::vector<Int>&, const Int& nv) { counts[static_cast<std::size_t>(to_ll(nv))]++; });
  return counts;
}

// ---------------------------------------------------------------------------
// Definite isometry

/// g with g^T G2 g = G1 (columns are images of L1's basis in L2 coordinates).
inline std::optional<IntMat> is_isometric_definite(const Lattice& l1, const Lattice& l2, std::size_t node_budget = 5000000) {
  int s1 = detail::definite_sign(l1), s2 = detail::definite_sign(l2);
  if (l1.rank() != l2.rank()) return std::nullopt;
  const std::size_t n = l1.rank();
  if (n == 0) return IntMat(0, 0);
  if (s1 != s2) return std::nullopt;
  if (n > 8 || abs(l1.det()) > 256 || abs(l2.det()) > 256)
    fail(ErrorKind::ResourceLimit, "definite isometry test limited to rank 8 and |det| 256");
  if (l1.det() != l2.det()) return std::nullopt;
  IntMat a1 = s1 > 0 ? l1.gram() : l1.gram().scaled(Int(-1));
  IntMat a2 = s1 > 0 ? l2.gram() : l2.gram().scaled(Int(-1));

  // generating set of short vectors of L1, by increasing norm
  std::vector<std::pair<Int, std::vector<Int>>> pool;
  std::vector<std::vector<Int>> gens;
  std::vector<Int> gen_norms;
  Int level = 0;
  IntMat span(0, n);
  auto generated_index = [&](const IntMat& m) -> Int {
    if (m.rows() == 0 || rank(m) < n) return 0;
    return determinant(hermite_normal_form(m));
  };
  while (generated_index(span) != 1) {
    level += 2;
    if (level > 64) fail(ErrorKind::ResourceLimit, "no short generating set found");
    std::vector<std::vector<Int>> vs;
    detail::enumerate_up_to(a1, level, [&](const std::vector<Int>& x, const Int& nv) {
      if (nv > level - 2) vs.push_back(x);
    });
    std::sort(vs.begin(), vs.end(), [&](const auto& x, const auto& y) {
      Int nx = 0, ny = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          nx += x[i] * a1(i, j) * x[j];
          ny += y[i] * a1(i, j) * y[j];
        }
      return nx != ny ? nx < ny : x < y;
    });
    for (const auto& v : vs) {
      IntMat cand = vstack(span, IntMat::from_rows({v}, n));
      bool grows = rank(cand) > rank(span) || (rank(span) == n && generated_index(cand) < generated_index(span));
      if (!grows) continue;
      span = cand;
      gens.push_back(v);
      Int nv = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) nv += v[i] * a1(i, j) * v[j];
      gen_norms.push_back(nv);
      if (generated_index(span) == 1) break;
    }
  }

  // short vector counts must agree up to the largest generator norm
  Int max_norm = *std::max_element(gen_norms.begin(), gen_norms.end());
  Lattice p1(a1), p2(a2);
  if (short_vector_counts(p1, max_norm) != short_vector_counts(p2, max_norm)) return std::nullopt;

  // candidate images: all vectors of L2 with the generator's norm, both signs
  std::vector<std::vector<std::vector<Int>>> cand(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (auto v : short_vectors(p2, gen_norms[i])) {
      cand[i].push_back(v);
      for (auto& c : v) c = -c;
      cand[i].push_back(v);
    }
  }
  auto ip1 = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
    Int s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += x[i] * a1(i, j) * y[j];
    return s;
  };
  auto ip2 = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
    Int s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += x[i] * a2(i, j) * y[j];
    return s;
  };
  std::vector<std::vector<Int>> img(gens.size());
  std::size_t nodes = 0;
  std::optional<IntMat> result;
  std::function<bool(std::size_t)> dfs = [&](std::size_t d) -> bool {
    if (d == gens.size()) {
      // solve gens * T = img using a rational basis among gens
      IntMat gm = IntMat::from_rows(gens, n), im = IntMat::from_rows(img, n);
      std::vector<std::size_t> pick;
      IntMat cur(0, n);
      for (std::size_t i = 0; i < gens.size() && pick.size() < n; ++i) {
        IntMat c = vstack(cur, gm.select_rows({i}));
        if (rank(c) > cur.rows()) {
          cur = c;
          pick.push_back(i);
        }
      }
      RatMat t = inverse(to_rat(gm.select_rows(pick))) * to_rat(im.select_rows(pick));
      auto ti = to_int(t);
      if (!ti) return false;
      if (gm * *ti != im) return false;
      IntMat g = ti->transpose();
      if (g.transpose() * l2.gram() * g != l1.gram()) return false;
      result = g;
      return true;
    }
    for (const auto& y : cand[d]) {
      if (++nodes > node_budget) fail(ErrorKind::ResourceLimit, "isometry search exceeded node budget");
      bool ok = true;
      for (std::size_t j = 0; j < d && ok; ++j)
        if (ip2(y, img[j]) != ip1(gens[d], gens[j])) ok = false;
      if (!ok) continue;
      img[d] = y;
      if (dfs(d + 1)) return true;
    }
    return false;
  };
  dfs(0);
  return result;
}

// ---------------------------------------------------------------------------
// Involutions

struct InvolutionData {
  Lattice lattice;
  IntMat matrix;

  InvolutionData() = default;
  InvolutionData(Lattice l, IntMat g) : lattice(std::move(l)), matrix(std::move(g)) {
    const std::size_t n = lattice.rank();
    if (matrix.rows() != n || matrix.cols() != n) fail(ErrorKind::InvalidArgument, "involution has wrong size");
    if (matrix * matrix != IntMat::identity(n)) fail(ErrorKind::InvalidArgument, "matrix is not an involution");
    if (matrix.transpose() * lattice.gram() * matrix != lattice.gram())
      fail(ErrorKind::InvalidArgument, "matrix does not preserve the Gram matrix");
  }
};

struct Eigenlattices {
  Sublattice fixed;
  Sublattice anti;
};

inline Eigenlattices involution_eigenlattices(const InvolutionData& inv) {
  const std::size_t n = inv.lattice.rank();
  IntMat id = IntMat::identity(n);
  Sublattice fixed(inv.lattice, kernel_basis((inv.matrix - id).transpose()));
  Sublattice anti(inv.lattice, kernel_basis((inv.matrix + id).transpose()));
  return {fixed, anti};
}

/// +1 on P and -1 on its orthogonal complement, extended to L.
inline InvolutionData involution_from_orthogonal_pair(const Lattice& l, const Sublattice& p) {
  const std::size_t n = l.rank();
  if (abs(l.det()) != 1) fail(ErrorKind::InvalidArgument, "ambient lattice must be unimodular");
  if (p.rank() == 0) return InvolutionData(l, IntMat::identity(n).scaled(Int(-1)));
  // projection onto P (x) Q on column vectors: B^T G_P^{-1} B G
  RatMat b = to_rat(p.basis);
  RatMat proj = b.transpose() * inverse(p.gram()) * b * to_rat(l.gram());
  RatMat g = proj.scaled(Rat(2)) - RatMat::identity(n);
  auto gi = to_int(g);
  if (!gi) fail(ErrorKind::NotExtendable, "involution does not extend integrally");
  return InvolutionData(l, *gi);
}

}  // namespace enrinv
