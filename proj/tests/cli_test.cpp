#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "enrinv/report.hpp"

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout; stderr is discarded.
CliRun run(const std::string& args) {
  std::string cmd = std::string(ENRINV_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const std::string& f) { return std::string(ENRINV_TEST_DATA) + "/" + f; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, DiscformOfDoubledLattices) {
  CliRun e8 = run("discform " + data("e8x2.json"));
  EXPECT_EQ(e8.status, 0);
  EXPECT_TRUE(contains(e8.out, "label: u^4")) << e8.out;
  CliRun d6 = run("discform " + data("d6x2.json"));
  EXPECT_TRUE(contains(d6.out, "label: u^2 + <1/4>^2")) << d6.out;
  CliRun a1 = run("discform " + data("a1x2.json"));
  EXPECT_TRUE(contains(a1.out, "orders: 4")) << a1.out;
}

TEST(Cli, FormFileRoundTrip) {
  CliRun f = run("discform " + data("d4x2.json") + " --emit-form");
  ASSERT_EQ(f.status, 0);
  std::string path = ::testing::TempDir() + "/d4x2_form.json";
  std::ofstream(path) << f.out;
  CliRun g = run("discform " + path + " --emit-form");
  EXPECT_EQ(g.status, 0);
  EXPECT_EQ(f.out, g.out);
}

TEST(Cli, Invariants) {
  CliRun t = run("invariants " + data("u2_a1_8.json"));
  EXPECT_EQ(t.status, 0);
  EXPECT_EQ(t.out, "(10,10,1)\n");
  EXPECT_EQ(run("invariants " + data("u2_e8x2.json")).out, "(10,10,0)\n");
  EXPECT_EQ(run("invariants " + data("odd.json")).status, 1);
}

TEST(Cli, ComplementOfARootIsE7AndRoundTrips) {
  CliRun c = run("complement " + data("e8.json") + " --sub " + data("e8_a1_sub.json"));
  ASSERT_EQ(c.status, 0);
  enrinv::Json j = enrinv::Json::parse(c.out);
  enrinv::Lattice amb = enrinv::lattice_from_json(j);
  EXPECT_EQ(amb.gram(), enrinv::make_named("E8").gram());
  enrinv::Sublattice s(amb, enrinv::basis_from_json(j));
  EXPECT_EQ(s.rank(), 7u);
  EXPECT_EQ(abs(s.lattice().det()), 2);
  EXPECT_EQ(s.lattice().signature(), std::make_pair(std::size_t{0}, std::size_t{7}));
}

TEST(Cli, ShortVectors) {
  CliRun e8x2 = run("shortvec " + data("e8x2.json") + " --norm -2");
  EXPECT_EQ(e8x2.status, 0);
  EXPECT_EQ(e8x2.out, "0 vectors\n");
  CliRun e8 = run("shortvec " + data("e8.json") + " --norm -2");
  EXPECT_EQ(e8.out.substr(0, 12), "240 vectors\n");
  EXPECT_EQ(count_lines(e8.out), 121u);
  EXPECT_EQ(run("shortvec " + data("u.json") + " --norm 0").status, 1);
}

TEST(Cli, FixedLocus) {
  EXPECT_EQ(run("fixed-locus 18 2 0").out, "genus 1 curve + 8 rational curves\n");
  EXPECT_EQ(run("fixed-locus 10 8 0").out, "two elliptic curves\n");
  EXPECT_EQ(run("fixed-locus 10 10 0").out, "empty\n");
  EXPECT_EQ(run("fixed-locus 10 12 0").status, 1);
}

TEST(Cli, ClassifyFormats) {
  CliRun csv = run("classify --format csv --threads 4");
  ASSERT_EQ(csv.status, 0);
  EXPECT_EQ(count_lines(csv.out), 19u);
  EXPECT_TRUE(contains(csv.out, "\n14,\"A1^4\",\"A1^4\",\"w^4\",\"w^4\",\"u + <1/4>^4\",\"U+U(2)+A1(2)^4\",10,10,1,"));
  CliRun json = run("classify --format json --threads 4");
  ASSERT_EQ(json.status, 0);
  auto j = enrinv::Json::parse(json.out);
  ASSERT_EQ(j["rows"].size(), 18u);
  EXPECT_EQ(j["rows"][12]["fixed_X"], "empty");
  EXPECT_EQ(j["rows"][12]["q_h_tilde_minus"], "z^2");
  CliRun md = run("classify --format md --threads 4");
  EXPECT_TRUE(contains(md.out, "| 18 | E8 | {0} |"));
}

TEST(Cli, VerifyIsStable) {
  CliRun a = run("verify --stable --threads 4");
  CliRun b = run("verify --stable --threads 4");
  EXPECT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(count_lines(a.out), 9u);
  EXPECT_FALSE(contains(a.out, "timestamp"));
}

TEST(Cli, UsageAndParseErrorsExitTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("classify --format xml").status, 2);
  EXPECT_EQ(run("fixed-locus 10").status, 2);
  EXPECT_EQ(run("discform " + data("asymmetric.json")).status, 2);
  EXPECT_EQ(run("discform " + data("truncated.json")).status, 2);
  EXPECT_EQ(run("discform " + data("missing.json")).status, 2);
}
