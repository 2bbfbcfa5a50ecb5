#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "treepress/cli.hpp"

using namespace treepress;
namespace fs = std::filesystem;

namespace {

const char* kGolden =
    "# golden mean\n"
    "alphabet: 0 1\n"
    "E:\n"
    "1 1\n"
    "1 0\n";

const char* kWeighted =
    "alphabet: a b\n"
    "E:\n"
    "2 2\n"
    "1 0\n";

const char* kFull =
    "alphabet: x y\n"
    "E:\n"
    "1 1\n"
    "1 1\n";

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("treepress_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Value of a "key: value" line.
double field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
  ADD_FAILURE() << "missing field " << key << " in\n" << text;
  return NAN;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string parse_error(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseSystem, GoldenMeanFile) {
  const InteractionSystem sys = parse_system(kGolden);
  EXPECT_EQ(sys.size(), 2u);
  EXPECT_EQ(sys.alphabet().label(0), "0");
  EXPECT_EQ(sys.alphabet().label(1), "1");
  EXPECT_EQ(sys.E()(0, 0), 1.0);
  EXPECT_EQ(sys.E()(1, 1), 0.0);
  EXPECT_EQ(sys.w(), (std::vector<double>{1.0, 1.0}));
}

TEST(ParseSystem, WeightsAndCommentsAndBlankLines) {
  const InteractionSystem sys = parse_system("alphabet: p q   # two symbols\n\nE:\n0.5 2\n\n3 0\nw: 2 3\n");
  EXPECT_EQ(sys.w(), (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(sys.E()(0, 0), 0.5);
  EXPECT_EQ(sys.E()(1, 0), 3.0);
}

TEST(ParseSystem, ErrorsNameTheLine) {
  const std::string negative = parse_error("alphabet: 0 1\nE:\n1 -1\n1 0\n");
  EXPECT_NE(negative.find("line 3"), std::string::npos) << negative;
  EXPECT_NE(negative.find("negative"), std::string::npos);
  EXPECT_NE(negative.find("-1"), std::string::npos);

  const std::string word = parse_error("alphabet: 0 1\nE:\n1 1\n1 zero\n");
  EXPECT_NE(word.find("line 4"), std::string::npos) << word;
  EXPECT_NE(word.find("non-numeric"), std::string::npos);

  const std::string ragged = parse_error("alphabet: 0 1\nE:\n1 1 1\n1 0\n");
  EXPECT_NE(ragged.find("line 3"), std::string::npos) << ragged;
  EXPECT_NE(ragged.find("ragged"), std::string::npos);

  const std::string header = parse_error("symbols: 0 1\nE:\n1 1\n1 0\n");
  EXPECT_NE(header.find("line 1"), std::string::npos) << header;
  EXPECT_NE(header.find("malformed header"), std::string::npos);

  const std::string assumption = parse_error("alphabet: 0 1\nE:\n1 0\n1 0\n");
  EXPECT_NE(assumption.find("line 2"), std::string::npos) << assumption;
  EXPECT_NE(assumption.find("assumption (A)"), std::string::npos);

  const std::string weights = parse_error("alphabet: 0 1\nE:\n1 1\n1 0\nw: 1\n");
  EXPECT_NE(weights.find("line 5"), std::string::npos) << weights;

  // Distinct messages per failure kind.
  const std::set<std::string> kinds{negative.substr(8, 10), word.substr(8, 10), ragged.substr(8, 10),
                                    header.substr(8, 10), assumption.substr(8, 10)};
  EXPECT_EQ(kinds.size(), 5u);
}

TEST(ParseSystem, RenderRoundTrip) {
  for (const char* text : {kGolden, kWeighted, kFull}) {
    const InteractionSystem sys = parse_system(text);
    const std::string canonical = render_system(sys);
    const InteractionSystem back = parse_system(canonical);
    EXPECT_EQ(render_system(back), canonical);
    EXPECT_EQ(back.w(), sys.w());
    for (std::size_t a = 0; a < sys.size(); ++a)
      for (std::size_t b = 0; b < sys.size(); ++b) EXPECT_EQ(back.E()(a, b), sys.E()(a, b));
  }
  const InteractionSystem odd = parse_system("alphabet: u v w\nE:\n0.1 0 3\n0 2.5 0\n1e-3 0 7\nw: 0.3 1 2\n");
  EXPECT_EQ(render_system(parse_system(render_system(odd))), render_system(odd));
}

TEST(CliPressure, GoldenMeanInNats) {
  TempDir dir;
  const auto r = run({"pressure", "--system", dir.write("g.sys", kGolden), "--d", "2", "--base", "e"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "pressure"), 0.508898, 2e-6);
  EXPECT_LE(field(r.out, "width"), 1e-6);
  EXPECT_LE(field(r.out, "pressure_lo"), field(r.out, "pressure_hi"));
}

TEST(CliPressure, LargeDegreeInBaseTen) {
  TempDir dir;
  const auto r = run({"pressure", "--system", dir.write("g.sys", kGolden), "--d", "256", "--base", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "pressure"), 0.3010, 0.01);
}

TEST(CliPressure, UsageErrors) {
  TempDir dir;
  const std::string g = dir.write("g.sys", kGolden);
  auto r = run({"pressure", "--system", g, "--d", "1.0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("d must exceed 1"), std::string::npos);
  EXPECT_EQ(run({"pressure", "--system", g, "--d", "2", "--base", "1"}).code, 2);
  EXPECT_EQ(run({"pressure", "--system", g}).code, 2);
  EXPECT_EQ(run({"pressure", "--system", dir.file("missing.sys"), "--d", "2"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  r = run({"pressure", "--system", dir.write("bad.sys", "alphabet: 0 1\nE:\n1 -1\n1 0\n"), "--d", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
}

TEST(CliPressure, HelpExitsCleanly) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(CliSweep, GoldenMeanCertified) {
  TempDir dir;
  const auto r = run({"sweep", "--system", dir.write("g.sys", kGolden), "--d-min", "1.1", "--d-max", "8", "--points",
                      "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 41u);
  EXPECT_NE(r.err.find("monotone_certified: true"), std::string::npos);
  const SweepResult parsed = parse_csv(r.out);
  EXPECT_TRUE(parsed.monotone_certified);
  EXPECT_EQ(parsed.log_base, 10.0);
}

TEST(CliSweep, SinglePointAndOutFile) {
  TempDir dir;
  const std::string g = dir.write("g.sys", kGolden);
  auto r = run({"sweep", "--system", g, "--d-min", "2", "--d-max", "2", "--points", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 2u);

  r = run({"sweep", "--system", g, "--d-min", "1.5", "--d-max", "16", "--points", "5", "--log-grid", "--out",
           dir.file("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("monotone_certified: true"), std::string::npos);
  EXPECT_EQ(parse_csv(slurp(dir.file("s.csv"))).rows.size(), 5u);
}

TEST(CliSweep, SvgOutput) {
  TempDir dir;
  const auto r = run({"sweep", "--system", dir.write("g.sys", kGolden), "--d-min", "1.5", "--d-max", "8", "--points",
                      "6", "--format", "svg", "--out", dir.file("plot.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = slurp(dir.file("plot.svg"));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(CliSweep, UsageErrors) {
  TempDir dir;
  const std::string g = dir.write("g.sys", kGolden);
  EXPECT_EQ(run({"sweep", "--system", g, "--d-min", "1", "--d-max", "2", "--points", "3"}).code, 2);
  EXPECT_EQ(run({"sweep", "--system", g, "--d-min", "3", "--d-max", "2", "--points", "3"}).code, 2);
  EXPECT_EQ(run({"sweep", "--system", g, "--d-min", "2", "--d-max", "3", "--points", "0"}).code, 2);
  EXPECT_EQ(run({"sweep", "--system", g, "--d-min", "2", "--d-max", "3", "--points", "2", "--format", "png"}).code, 2);
}

TEST(CliOracle, GoldenMeanValues) {
  TempDir dir;
  const auto r = run({"oracle", "--system", dir.write("g.sys", kGolden), "--d", "2", "--depth", "2", "--classes",
                      "--omega"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n,a_n\n0,0.693147\n1,0.536479\n2,0.53051\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("classes: 14"), std::string::npos);
  EXPECT_NE(r.out.find("class_total: 41"), std::string::npos);
  EXPECT_NE(r.out.find("distribution_sequences: "), std::string::npos);
}

TEST(CliOracle, GuardExceeded) {
  TempDir dir;
  const std::string g = dir.write("g.sys", kGolden);
  auto r = run({"oracle", "--system", g, "--d", "2", "--depth", "60"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("guard"), std::string::npos) << r.err;
  r = run({"oracle", "--system", g, "--d", "2", "--depth", "8", "--classes"});
  EXPECT_EQ(r.code, 4);
}

TEST(CliOracle, Bracket) {
  TempDir dir;
  const std::string g = dir.write("g.sys", kGolden);
  auto r = run({"oracle", "--system", g, "--d", "2", "--depth", "18", "--bracket", "--kmax", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto at = r.out.find("bracket: [");
  ASSERT_NE(at, std::string::npos);
  const double width = std::stod(r.out.substr(r.out.find("width ", at) + 6));
  EXPECT_LT(width, 2e-5);
  EXPECT_EQ(run({"oracle", "--system", g, "--d", "2", "--depth", "3", "--kmax", "5"}).code, 2);

  r = run({"oracle", "--system", dir.write("w.sys", kWeighted), "--d", "2", "--depth", "10", "--bracket"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bracket violated"), std::string::npos);
}

TEST(CliLimits, Anchors) {
  TempDir dir;
  auto r = run({"limits", "--system", dir.write("w.sys", kWeighted)});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "log_rho"), 0.4365, 5e-4);
  EXPECT_NEAR(field(r.out, "log_r"), 0.4771, 5e-4);

  r = run({"limits", "--system", dir.write("g.sys", kGolden)});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(std::abs(field(r.out, "gap_low_nats")), 0.02);
  EXPECT_LE(std::abs(field(r.out, "gap_high_nats")), 0.01);

  r = run({"limits", "--system", dir.write("f.sys", kFull), "--base", "e"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "log_rho"), field(r.out, "log_r"), 1e-6);
  EXPECT_LE(std::abs(field(r.out, "gap_low_nats")), 1e-5);

  r = run({"limits", "--system", dir.file("g.sys"), "--tol-high", "1e-9"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run({"limits", "--system", dir.file("g.sys"), "--d-low", "2", "--d-high", "1.5"}).code, 2);
}

TEST(Cli, OutputIsDeterministic) {
  TempDir dir;
  const std::string g = dir.write("g.sys", kGolden);
  const std::vector<std::vector<std::string>> commands{
      {"pressure", "--system", g, "--d", "3.5"},
      {"sweep", "--system", g, "--d-min", "1.2", "--d-max", "9", "--points", "7", "--log-grid"},
      {"sweep", "--system", g, "--d-min", "1.2", "--d-max", "9", "--points", "7", "--format", "svg"},
      {"oracle", "--system", g, "--d", "3", "--depth", "2", "--omega", "--classes"},
      {"limits", "--system", g}};
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
  }
}
