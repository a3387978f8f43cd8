#pragma once

// Immutable reference data: root-subsystem embeddings into E8, the candidate
// list for K-, the golden classification tables and the row numbering.
//
// E8 uses the Bourbaki simple roots a1..a8 (chain 1-3-4-5-6-7-8, node 2 on
// node 4) with Gram = -Cartan. Embedding rows are unit vectors on simple
// roots, ordered so that the induced Gram equals make_named(name) exactly.

#include <array>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "enrinv/golden_data.hpp"
#include "enrinv/lattice.hpp"

namespace enrinv {

struct EmbeddingRecord {
  std::string name;     ///< S+(1/2) as a sublattice of E8
  std::string partner;  ///< expected isometry class of its complement, S-(1/2)
  IntMat rows;          ///< coordinates in the E8 simple-root basis
};

namespace detail {

inline IntMat root_rows(const std::vector<int>& labels) {
  IntMat b(labels.size(), 8);
  for (std::size_t i = 0; i < labels.size(); ++i) b(i, static_cast<std::size_t>(labels[i] - 1)) = 1;
  return b;
}

inline std::vector<EmbeddingRecord> raw_embeddings() {
  return {
      {"{0}", "E8", IntMat(0, 8)},
      {"A1", "E7", root_rows({1})},
      {"A1^2", "D6", root_rows({1, 4})},
      {"A1^3", "D4+A1", root_rows({1, 4, 6})},
      {"A1^4", "A1^4", root_rows({1, 4, 6, 8})},
      {"D4", "D4", root_rows({3, 4, 2, 5})},
      {"D4+A1", "A1^3", root_rows({3, 4, 2, 5, 7})},
      {"D6", "A1^2", root_rows({7, 6, 5, 4, 3, 2})},
      {"E7", "A1", root_rows({1, 2, 3, 4, 5, 6, 7})},
      {"E8", "{0}", root_rows({1, 2, 3, 4, 5, 6, 7, 8})},
  };
}

inline void check_embedding(const EmbeddingRecord& r) {
  const Lattice e8 = make_named("E8");
  auto bad = [&r](const std::string& why) { fail(ErrorKind::CatalogInconsistent, "embedding " + r.name + ": " + why); };
  if (r.rows.cols() != 8) bad("rows must have 8 coordinates");
  Sublattice s(e8, r.rows);
  if (s.gram() != make_named(r.name).gram()) bad("induced Gram differs from the named lattice");
  if (s.rank() > 0 && saturate(r.rows, 8) != hermite_normal_form(r.rows)) bad("not primitive in E8");
  Sublattice c = orthogonal_complement(s);
  if (!is_isometric_definite(c.lattice(), make_named(r.partner))) bad("complement is not " + r.partner);
}

}  // namespace detail

/// The ten embeddings in pair order ({0}, A1, A1^2, A1^3, A1^4, D4, D4+A1, D6, E7, E8),
/// verified on first use.
inline const std::vector<EmbeddingRecord>& embeddings() {
  static const std::vector<EmbeddingRecord> recs = [] {
    auto r = detail::raw_embeddings();
    for (const auto& e : r) detail::check_embedding(e);
    return r;
  }();
  return recs;
}

inline const EmbeddingRecord& embedding(const std::string& name) {
  for (const auto& e : embeddings())
    if (e.name == name) return e;
  fail(ErrorKind::UnknownName, "no catalog embedding named '" + name + "'");
}

/// Candidates for K- in the form printed in the reference table.
inline const std::vector<std::string>& k_minus_candidate_names() {
  static const std::vector<std::string> names = {
      "U+U(2)",
      "U(2)+U(2)",
      "U+U(2)+A1(2)",
      "U+U(2)+A1(2)^2",
      "U+U(2)+A1(2)^3",
      "U+U(2)+A1(2)^4",
      "U(2)+U(2)+A1(2)",
      "U(2)+U(2)+A1(2)^2",
      "U(2)+U(2)+A1(2)^3",
      "U+U(2)+D4(2)",
      "U(2)+U(2)+D4(2)",
      "U+U(2)+D4(2)+A1(2)",
      "U+U(2)+D6(2)",
      "U+U(2)+E7(2)",
      "U+U(2)+E8(2)",
  };
  return names;
}

inline std::vector<Lattice> k_minus_candidates() {
  std::vector<Lattice> out;
  for (const auto& n : k_minus_candidate_names()) out.push_back(make_named(n).renamed(n));
  return out;
}

/// Even lattices used for catalog-wide property checks.
inline std::vector<std::string> even_catalog_lattice_names() {
  std::vector<std::string> names = {"U", "U(2)", "A1", "A1(2)", "A1^2", "A1^3", "A1^4", "A1(2)^4", "D4", "D4(2)", "D4+A1",
                                    "D4(2)+A1(2)", "D6", "D6(2)", "E7", "E7(2)", "E8", "E8(2)", "U(2)+E8(2)", "U+E8"};
  for (const auto& k : k_minus_candidate_names()) names.push_back(k);
  return names;
}

// ---------------------------------------------------------------------------
// Golden tables

struct GoldenRow {
  int no = 0;
  std::string s_plus, s_minus;
  std::string q_h, q_h_tilde;  ///< q_h_tilde is q_h when printed blank
  std::string k_minus, K_minus;
  TwoElemInvariants rld;
  std::string fixed_y;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

}  // namespace detail

/// Parses the pipe-separated table format; '#' starts a comment line.
inline std::vector<GoldenRow> parse_golden_tables(const std::string& text) {
  std::vector<GoldenRow> rows;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto f = detail::split(t, '|');
    auto bad = [&](const std::string& why) {
      fail(ErrorKind::Parse, "golden table line " + std::to_string(lineno) + ": " + why);
    };
    if (f.size() != 9) bad("expected 9 fields");
    GoldenRow r;
    try {
      r.no = std::stoi(f[0]);
    } catch (const std::exception&) {
      bad("bad row number");
    }
    r.s_plus = f[1];
    r.s_minus = f[2];
    r.q_h = f[3];
    r.q_h_tilde = f[4].empty() ? f[3] : f[4];
    r.k_minus = f[5];
    r.K_minus = f[6];
    auto parts = detail::split(f[7], ',');
    if (parts.size() != 3) bad("bad (r,l,delta)");
    try {
      r.rld = {std::stoul(parts[0]), std::stoul(parts[1]), std::stoi(parts[2])};
    } catch (const std::exception&) {
      bad("bad (r,l,delta)");
    }
    r.fixed_y = f[8];
    rows.push_back(r);
  }
  return rows;
}

inline const std::vector<GoldenRow>& golden_tables() {
  static const std::vector<GoldenRow> rows = [] {
    auto r = parse_golden_tables(golden::kGoldenTables);
    if (r.size() != 18) fail(ErrorKind::CatalogInconsistent, "golden tables must have 18 rows");
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i].no != static_cast<int>(i + 1)) fail(ErrorKind::CatalogInconsistent, "golden rows out of order");
    return r;
  }();
  return rows;
}

inline const GoldenRow& golden_row(int no) {
  if (no < 1 || no > 18) fail(ErrorKind::InvalidArgument, "row number must be in 1..18");
  return golden_tables()[static_cast<std::size_t>(no - 1)];
}

/// Euler characteristic of a fixed-curve label such as "C(1)+4P1",
/// "C1(1)+C2(1)", "P1" or "empty": chi(C(g)) = 2 - 2g, chi(P1) = 2.
inline long long fixed_curves_euler(const std::string& label) {
  std::string s = trim(label);
  if (s == "empty" || s == "0") return 0;
  long long chi = 0;
  for (const auto& term : detail::split(s, '+')) {
    if (term.empty()) fail(ErrorKind::Parse, "empty term in curve label '" + label + "'");
    std::size_t i = 0;
    long long count = 0;
    while (i < term.size() && std::isdigit(static_cast<unsigned char>(term[i]))) count = count * 10 + (term[i++] - '0');
    if (i == 0) count = 1;
    std::string rest = term.substr(i);
    if (rest == "P1") {
      chi += 2 * count;
      continue;
    }
    if (!rest.empty() && rest[0] == 'C') {
      auto open = rest.find('('), close = rest.find(')');
      if (open != std::string::npos && close == rest.size() - 1 && close > open + 1) {
        long long g = std::stoll(rest.substr(open + 1, close - open - 1));
        chi += count * (2 - 2 * g);
        continue;
      }
    }
    fail(ErrorKind::Parse, "bad term '" + term + "' in curve label '" + label + "'");
  }
  return chi;
}

/// Generated row order -> reference numbering. Rows are generated by pair
/// (S+ rank, then pair order), then by descriptor of q|H-, then of q|H~-.
inline const std::array<int, 18>& row_permutation() {
  static const std::array<int, 18> p = {3, 2, 1, 5, 4, 7, 6, 9, 8, 14, 13, 12, 11, 10, 15, 16, 17, 18};
  return p;
}

}  // namespace enrinv
