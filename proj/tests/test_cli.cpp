#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli_app.hpp"
#include "oracles.hpp"

using namespace nsagree;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(NSAGREE_SAMPLES_DIR) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Keeps empty cells, unlike the CLI's own splitter.
std::vector<std::string> csv_cells(const std::string& row) {
  std::vector<std::string> out(1);
  for (char c : row) {
    if (c == ',')
      out.emplace_back();
    else
      out.back() += c;
  }
  return out;
}

}  // namespace

TEST(Cli, ClassifyPrVariant) {
  const Result r = run({"classify", "--input", sample("pr.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(j.at("conclusion"), "POSTQUANTUM");
  EXPECT_FALSE(j.at("local").get<bool>());
}

TEST(Cli, ClassifyUniformAndSplit) {
  EXPECT_EQ(io::json::parse(run({"classify", "-i", sample("uniform.json")}).out).at("conclusion"), "LOCAL");
  const Result r = run({"classify", "-i", sample("split_pr.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(j.at("conclusion"), "POSTQUANTUM");
  EXPECT_EQ(j.at("reduction").at("plan").at("alice_group"), io::json::array({0, 2}));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::usage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::usage);
  EXPECT_EQ(run({"classify"}).code, cli::usage);
  EXPECT_EQ(run({"classify", "-i", sample("malformed.json")}).code, cli::parse_failure);
  EXPECT_EQ(run({"classify", "-i", sample("does_not_exist.json")}).code, cli::parse_failure);
  const Result sig = run({"classify", "-i", sample("signaling.json")});
  EXPECT_EQ(sig.code, cli::validation_failure);
  EXPECT_NE(sig.err.find("no_signaling"), std::string::npos);
  EXPECT_EQ(run({"ontology", "-i", sample("signaling.json")}).code, cli::validation_failure);
  EXPECT_EQ(run({"reduce", "-i", sample("uniform.json")}).code, cli::precondition_failure);
  EXPECT_EQ(run({"verify-classical", "--omega", "3", "--budget", "5"}).code, cli::budget_exceeded);
  EXPECT_EQ(run({"sweep", "--family", "ccd", "--grid", "r=0:2:1/2;s=0;t=0;u=0"}).code, cli::usage);
}

TEST(Cli, GenerateWarnsOnConstraintFailure) {
  const Result r = run({"generate", "--family", "ccd", "--params", "r=0,s=1/2,t=0,u=1/2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning: r>0 violated"), std::string::npos);
  const Box box = io::box_from_json(io::json::parse(r.out));
  EXPECT_EQ(box, ccd_family_box({Rational(0), Rational(1, 2), Rational(0), Rational(1, 2)}));
}

TEST(Cli, GenerateKnownBoxes) {
  EXPECT_EQ(io::box_from_json(io::json::parse(run({"generate", "--family", "pr"}).out)), pr_variant_box());
  const Result u = run({"generate", "--family", "uniform", "--shape", "3,2,2,2"});
  EXPECT_EQ(io::box_from_json(io::json::parse(u.out)), uniform_box(Shape{3, 2, 2, 2}));
  EXPECT_EQ(run({"generate", "--family", "ccd", "--params", "r=1/2"}).code, cli::usage);
}

TEST(Cli, SweepCcdGrid) {
  const Result r = run({"sweep", "--family", "ccd", "--grid", "r=0:1/2:1/4;s=1/2;t=0;u=0|1/4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0], "r,s,t,u,r_dec,s_dec,t_dec,u_dec,qA,qA_dec,qB,qB_dec,ccd,sd,local,gap,gap_dec");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = csv_cells(rows[i]);
    ASSERT_EQ(cells.size(), 17u) << rows[i];
    const TableParams p{parse_rational(cells[0]), parse_rational(cells[1]), parse_rational(cells[2]),
                        parse_rational(cells[3])};
    EXPECT_EQ(cells[12] == "true", oracle::ccd_family_disagrees(p)) << rows[i];
  }
}

TEST(Cli, SweepSamplingIsSeeded) {
  const std::vector<std::string> args{"sweep", "--family", "sd", "--grid", "r=0:1:1/4;s=0:1:1/4;t=0|1/4;u=1/2",
                                      "--samples", "6", "--seed", "7"};
  const Result a = run(args);
  const Result b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_LE(lines(a.out).size(), 7u);
}

TEST(Cli, SweepPrRow) {
  const Result r = run({"sweep", "--family", "pr"});
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], "1/2,1/2,0,1/2,0.5,0.5,0,0.5,1,1,0,0,true,true,false,-2,-2");
}

TEST(Cli, ReduceSplitBox) {
  const Result r = run({"reduce", "-i", sample("split_pr.json"), "--mode", "sd"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(io::box_from_json(j.at("box")), pr_variant_box());
  EXPECT_EQ(j.at("plan").at("mode"), "sd");
}

TEST(Cli, OntologyAndOutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "nsagree_cli_model.json";
  const Result r = run({"ontology", "-i", sample("deterministic.json"), "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  const io::json j = io::json::parse(in);
  EXPECT_FALSE(j.at("signed").get<bool>());
  std::filesystem::remove(path);
}

TEST(Cli, VerifyClassicalSmall) {
  const Result r = run({"verify-classical", "--omega", "3", "--denominator", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(j.at("violations"), 0);
  EXPECT_TRUE(j.at("complete").get<bool>());
}
