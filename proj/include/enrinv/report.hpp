#pragma once

// File formats and report rendering for the command-line tool.
//
// Lattice file: {"name": optional string, "gram": [[int, ...], ...]}; entries
// may be JSON integers or decimal strings. A sublattice file adds "basis".
// Form file: {"orders": [...], "q": ["a/b", ...], "b": [["a/b", ...], ...]}.

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "enrinv/acceptance.hpp"

namespace enrinv {

using Json = nlohmann::json;

namespace detail {

inline Int json_int(const Json& v) {
  if (v.is_number_integer()) return Int(v.get<long long>());
  if (v.is_string()) {
    try {
      return Int(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::Parse, "expected an integer, got " + v.dump());
}

inline Rat json_rat(const Json& v) {
  if (v.is_number_integer()) return Rat(v.get<long long>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rat(Int(s));
      Int d(s.substr(slash + 1));
      if (d != 0) return Rat(Int(s.substr(0, slash)), d);
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::Parse, "expected a fraction \"a/b\", got " + v.dump());
}

inline IntMat json_matrix(const Json& v, const std::string& field) {
  if (!v.is_array()) fail(ErrorKind::Parse, "'" + field + "' must be an array of arrays");
  std::size_t cols = v.empty() ? 0 : v[0].size();
  IntMat m(v.size(), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) fail(ErrorKind::Parse, "'" + field + "' rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = json_int(v[i][j]);
  }
  return m;
}

inline std::string fraction(const Rat& r) {
  std::ostringstream os;
  os << numer(r) << "/" << denom(r);
  return os.str();
}

inline Json int_json(const Int& v) {
  if (abs(v) < Int(1) << 53) return Json(to_ll(v));
  return Json(v.str());
}

}  // namespace detail

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Parse, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline Lattice lattice_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("gram")) fail(ErrorKind::Parse, "lattice file needs a 'gram' field");
  IntMat g = detail::json_matrix(j["gram"], "gram");
  if (g.rows() != g.cols()) fail(ErrorKind::Parse, "Gram matrix must be square");
  if (g.transpose() != g) fail(ErrorKind::Parse, "Gram matrix must be symmetric");
  std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
  return Lattice(g, name);
}

inline Json lattice_to_json(const Lattice& l) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < l.rank(); ++i) {
    Json r = Json::array();
    for (std::size_t k = 0; k < l.rank(); ++k) r.push_back(detail::int_json(l.gram()(i, k)));
    rows.push_back(r);
  }
  Json j = {{"gram", rows}};
  if (!l.name().empty()) j["name"] = l.name();
  return j;
}

inline Json sublattice_to_json(const Sublattice& s) {
  Json j = lattice_to_json(s.ambient);
  Json rows = Json::array();
  for (std::size_t i = 0; i < s.basis.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t k = 0; k < s.basis.cols(); ++k) r.push_back(detail::int_json(s.basis(i, k)));
    rows.push_back(r);
  }
  j["basis"] = rows;
  return j;
}

inline IntMat basis_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("basis")) fail(ErrorKind::Parse, "sublattice file needs a 'basis' field");
  return detail::json_matrix(j["basis"], "basis");
}

inline Json form_to_json(const FQF& q) {
  Json orders = Json::array(), qs = Json::array(), bs = Json::array();
  for (const auto& o : q.orders()) orders.push_back(detail::int_json(o));
  RatMat g = q.gram();
  for (std::size_t i = 0; i < q.rank(); ++i) {
    qs.push_back(detail::fraction(g(i, i)));
    Json row = Json::array();
    for (std::size_t k = 0; k < q.rank(); ++k) {
      Elem a = q.zero(), b = q.zero();
      a[i] = 1;
      b[k] = 1;
      row.push_back(detail::fraction(mod_floor(q.b(a, b), Int(1))));
    }
    bs.push_back(row);
  }
  return {{"orders", orders}, {"q", qs}, {"b", bs}};
}

inline FQF form_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("orders") || !j.contains("q") || !j.contains("b"))
    fail(ErrorKind::Parse, "form file needs 'orders', 'q' and 'b'");
  std::vector<Int> orders;
  for (const auto& o : j["orders"]) orders.push_back(detail::json_int(o));
  const std::size_t k = orders.size();
  if (j["q"].size() != k || j["b"].size() != k) fail(ErrorKind::Parse, "form file sizes disagree");
  RatMat g(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    if (j["b"][i].size() != k) fail(ErrorKind::Parse, "'b' must be square");
    for (std::size_t c = 0; c < k; ++c) g(i, c) = i == c ? detail::json_rat(j["q"][i]) : detail::json_rat(j["b"][i][c]);
  }
  if (!g.is_symmetric()) fail(ErrorKind::Parse, "'b' must be symmetric");
  return FQF(orders, g);
}

inline std::string descriptor_str(const FormDescriptor& d) {
  std::ostringstream os;
  os << "factors=[";
  for (std::size_t i = 0; i < d.invariant_factors.size(); ++i) os << (i ? "," : "") << d.invariant_factors[i];
  os << "] dim=" << d.dim << " radical_dim=" << d.radical_dim << " radical_q_nonzero=" << (d.radical_q_nonzero ? 1 : 0);
  if (d.arf) os << " arf=" << *d.arf;
  if (d.order4_part) {
    os << " q_values={";
    bool first = true;
    for (const auto& [v, c] : *d.order4_part) {
      os << (first ? "" : ",") << detail::fraction(v) << ":" << c;
      first = false;
    }
    os << "}";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Rows and reports

inline Json row_to_json(const ClassRow& r) {
  Json rld = {{"r", r.rld.r}, {"l", r.rld.l}, {"delta", r.rld.delta}};
  return {{"no", r.no},
          {"s_plus", r.s_plus_name},
          {"s_minus", r.s_minus_name},
          {"q_h_minus", r.h_minus.label},
          {"q_h_tilde_minus", r.h_tilde.label},
          {"k_minus", r.k_minus.order() == 1 ? Json("trivial") : Json(form_label(r.k_minus))},
          {"k_minus_form", form_to_json(r.k_minus)},
          {"K_plus", r.K_plus.name()},
          {"K_minus", r.K_minus_name},
          {"rld", rld},
          {"fixed_X", r.fixed_x.str()},
          {"fixed_Y", r.fixed_y}};
}

inline std::string render_rows(const std::vector<ClassRow>& rows, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    Json a = Json::array();
    for (const auto& r : rows) a.push_back(row_to_json(r));
    os << Json{{"rows", a}}.dump(2) << "\n";
  } else if (format == "csv") {
    os << "no,s_plus,s_minus,q_h_minus,q_h_tilde_minus,k_minus,K_minus,r,l,delta,fixed_X,fixed_Y\n";
    auto q = [](const std::string& s) { return "\"" + s + "\""; };
    for (const auto& r : rows)
      os << r.no << "," << q(r.s_plus_name) << "," << q(r.s_minus_name) << "," << q(r.h_minus.label) << "," << q(r.h_tilde.label)
         << "," << q(form_label(r.k_minus)) << "," << q(r.K_minus_name) << "," << r.rld.r << "," << r.rld.l << "," << r.rld.delta
         << "," << q(r.fixed_x.str()) << "," << q(r.fixed_y) << "\n";
  } else if (format == "md" || format == "markdown") {
    os << "| No. | S+(1/2) | S-(1/2) | q on H- | q on H~- |\n|---|---|---|---|---|\n";
    for (const auto& r : rows)
      os << "| " << r.no << " | " << r.s_plus_name << " | " << r.s_minus_name << " | " << r.h_minus.label << " | "
         << (r.h_tilde.desc == r.h_minus.desc ? "" : r.h_tilde.label) << " |\n";
    os << "\n| No. | k- | K- | (r,l,delta) | Fixed curves on Y |\n|---|---|---|---|---|\n";
    for (const auto& r : rows)
      os << "| " << r.no << " | " << form_label(r.k_minus) << " | " << r.K_minus_name << " | " << r.rld.str() << " | " << r.fixed_y
         << " |\n";
  } else {
    fail(ErrorKind::Parse, "unknown format '" + format + "' (json, md, csv)");
  }
  return os.str();
}

inline std::string render_checks(const std::vector<CheckResult>& checks, const std::string& format, const std::string& timestamp) {
  std::ostringstream os;
  bool all = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  if (format == "json") {
    Json a = Json::array();
    for (const auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"details", c.details}});
    Json j = {{"checks", a}, {"pass", all}};
    if (!timestamp.empty()) j["timestamp"] = timestamp;
    os << j.dump(2) << "\n";
  } else {
    for (const auto& c : checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << " :: " << c.details << "\n";
    os << (all ? "all checks passed" : "some checks failed") << "\n";
    if (!timestamp.empty()) os << "timestamp " << timestamp << "\n";
  }
  return os.str();
}

}  // namespace enrinv
