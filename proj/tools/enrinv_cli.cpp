// Command-line front end. Exit codes: 0 success, 1 check or computation
// failure, 2 usage or parse error.

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <iostream>

#include "enrinv/report.hpp"

using namespace enrinv;

namespace {

int exit_code_for(const Error& e) { return e.kind() == ErrorKind::Parse ? 2 : 1; }

int cmd_discform(const std::string& file, bool emit_form) {
  Json j = read_json_file(file);
  FQF q = j.contains("orders") ? form_from_json(j) : discriminant_form(lattice_from_json(j));
  if (emit_form) {
    std::cout << form_to_json(q).dump() << "\n";
    return 0;
  }
  std::cout << "orders:";
  for (const auto& o : q.orders()) std::cout << " " << o;
  std::cout << "\nq:";
  RatMat g = q.gram();
  for (std::size_t i = 0; i < q.rank(); ++i) std::cout << " " << detail::fraction(g(i, i));
  std::cout << "\nlabel: " << form_label(q) << "\n";
  try {
    std::cout << "descriptor: " << descriptor_str(descriptor(q)) << "\n";
  } catch (const Error& e) {
    std::cout << "descriptor: unavailable (" << e.what() << ")\n";
  }
  return 0;
}

int cmd_invariants(const std::string& file) {
  Lattice l = lattice_from_json(read_json_file(file));
  std::cout << two_elementary_invariants(l).str() << "\n";
  return 0;
}

int cmd_complement(const std::string& file, const std::string& sub) {
  Lattice l = lattice_from_json(read_json_file(file));
  Sublattice s(l, basis_from_json(read_json_file(sub)));
  std::cout << sublattice_to_json(orthogonal_complement(s)).dump() << "\n";
  return 0;
}

int cmd_shortvec(const std::string& file, long long norm) {
  Lattice l = lattice_from_json(read_json_file(file));
  auto vs = short_vectors(l, Int(norm));
  std::cout << 2 * vs.size() << " vectors\n";
  for (const auto& v : vs) {
    std::cout << "+-(";
    for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? ", " : "") << v[i];
    std::cout << ")\n";
  }
  return 0;
}

std::string now_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact lattice tools and the classification of involutions on Enriques surfaces"};
  app.require_subcommand(1);

  std::string file, sub_file, format = "md";
  bool emit_form = false, stable = false;
  std::size_t threads = 1;
  long long norm = 0;
  std::size_t r = 0, l = 0;
  int delta = 0;

  auto* discform = app.add_subcommand("discform", "discriminant form of a lattice file (or a form file)");
  discform->add_option("file", file, "lattice or form file")->required();
  discform->add_flag("--emit-form", emit_form, "print the form in the form-file format");

  auto* invariants = app.add_subcommand("invariants", "(r,l,delta) of a 2-elementary even lattice");
  invariants->add_option("file", file, "lattice file")->required();

  auto* complement = app.add_subcommand("complement", "orthogonal complement of a sublattice");
  complement->add_option("file", file, "ambient lattice file")->required();
  complement->add_option("--sub", sub_file, "sublattice file with a 'basis' field")->required();

  auto* classify = app.add_subcommand("classify", "compute the 18 classification rows");
  classify->add_option("--format", format, "json, md or csv")->check(CLI::IsMember({"json", "md", "markdown", "csv"}));
  classify->add_option("--threads", threads, "row-level worker threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_flag("--stable", stable, "omit the timestamp so reports are byte-identical");
  verify->add_option("--threads", threads, "row-level worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text", "md"}));

  auto* fixed = app.add_subcommand("fixed-locus", "fixed locus on the K3 cover from (r,l,delta)");
  fixed->add_option("r", r)->required();
  fixed->add_option("l", l)->required();
  fixed->add_option("delta", delta)->required();

  auto* shortvec = app.add_subcommand("shortvec", "vectors of a given norm in a definite lattice");
  shortvec->add_option("file", file, "lattice file")->required();
  shortvec->add_option("--norm", norm, "target norm in the lattice's own sign")->required()->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*discform) return cmd_discform(file, emit_form);
    if (*invariants) return cmd_invariants(file);
    if (*complement) return cmd_complement(file, sub_file);
    if (*shortvec) return cmd_shortvec(file, norm);
    if (*fixed) {
      std::cout << fixed_locus_theta({r, l, delta}).str() << "\n";
      return 0;
    }
    if (*classify) {
      std::cout << render_rows(classify_all(threads), format);
      return 0;
    }
    if (*verify) {
      auto checks = run_acceptance(threads);
      std::cout << render_checks(checks, format == "json" ? "json" : "text", stable ? "" : now_utc());
      for (const auto& c : checks)
        if (!c.pass) {
          std::cerr << "first failing check: " << c.name << "\n";
          return 1;
        }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 2;
}
