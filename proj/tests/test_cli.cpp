#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "khoflow/cli.hpp"

using khoflow::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json invoke_json(std::vector<std::string> args) {
  args.push_back("--json");
  const auto r = invoke(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, KhrTrefoilTotal) {
  const auto j = invoke_json({"khr", "--corpus", "trefoil"});
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["total_dim"], 3);
  EXPECT_EQ(j["reduced"], true);
  EXPECT_NE(invoke({"khr", "--corpus", "trefoil"}).out.find("total: 3"), std::string::npos);
}

TEST(Cli, KhUnknotTable) {
  const auto j = invoke_json({"kh", "--corpus", "unknot"});
  EXPECT_EQ(j["table"], nlohmann::json::parse("[[0,-1,1],[0,1,1]]"));
}

TEST(Cli, MalformedPdFileIsInputError) {
  const auto path = temp_file("khoflow_bad_pd.txt", "X(1,2,3");
  const auto r = invoke({"khr", "--pd", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("MalformedToken"), std::string::npos);
  EXPECT_NE(r.err.find(path), std::string::npos);
}

TEST(Cli, PdFileInput) {
  const auto path = temp_file("khoflow_trefoil_pd.txt", "X(4,2,5,1) X(6,4,1,3) X(2,6,3,5)\n");
  EXPECT_EQ(invoke_json({"khr", "--pd", path})["total_dim"], 3);
  EXPECT_EQ(invoke_json({"det", "--pd", path})["det"], 3);
}

TEST(Cli, Determinants) {
  EXPECT_EQ(invoke_json({"det", "--corpus", "7_2"})["det"], 11);
  EXPECT_EQ(invoke_json({"det", "--corpus", "p237"})["det"], 1);
  const auto j = invoke_json({"h1", "--corpus", "unlink2"});
  EXPECT_EQ(j["det"], 0);
  EXPECT_EQ(j["b1"], 1);
  EXPECT_NE(invoke({"h1", "--corpus", "unlink2"}).out.find("b1: 1"), std::string::npos);
}

TEST(Cli, SpectralSequencePage) {
  const auto j = invoke_json({"ss", "--corpus", "trefoil_mirror", "--page", "2"});
  ASSERT_EQ(j["pages"].size(), 1u);
  std::size_t total = 0;
  for (const auto& cell : j["pages"][0]["dims"]) total += cell[1].get<std::size_t>();
  EXPECT_EQ(total, 3u);
  const auto r = invoke({"ss", "--corpus", "trefoil_mirror", "--page", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InvalidPage"), std::string::npos);
  const auto u = invoke_json({"ss", "--corpus", "unknot"});
  for (const auto& p : u["pages"]) EXPECT_EQ(p["dims"], nlohmann::json::parse("[[0,1]]"));
}

TEST(Cli, HmrModels) {
  const auto p = invoke_json({"hmr", "--model", "p237"});
  EXPECT_EQ(p["total_dim"], 3);
  EXPECT_EQ(p["abs_chi"], 3);
  EXPECT_EQ(p["by_grading"].size(), 1u);
  EXPECT_EQ(invoke_json({"hmr", "--model", "unlink(4)"})["total_dim"], 16);
  const auto t = invoke_json({"hmr", "--model", "two_bridge(10)", "--chi"});
  EXPECT_EQ(t["total_dim"], 10);
  ASSERT_EQ(t["spin_c"].size(), 10u);
  for (const auto& s : t["spin_c"]) {
    EXPECT_EQ(s["dim"], 1);
    EXPECT_EQ(s["abs_chi"], 1);
  }
  EXPECT_NE(invoke({"hmr", "--model", "two_bridge(10)", "--chi"}).out.find("sum |chi| over spin_c: 10"),
            std::string::npos);
}

TEST(Cli, HmrModelFile) {
  const auto path = temp_file("khoflow_model.json",
                              R"({"name": "file", "irreducibles": [["x", -1], ["y", -1]], "towers": 1,
                                  "upsilon_extra": [["a", "x"], ["a", "y"]]})");
  const auto j = invoke_json({"hmr", "--model", path});
  EXPECT_EQ(j["model"], "file");
  EXPECT_EQ(j["total_dim"], 3);
}

TEST(Cli, HmrErrors) {
  EXPECT_EQ(invoke({"hmr", "--model", "no_such_model"}).code, 2);
  const auto r = invoke({"hmr", "--model", "p237", "--trunc", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("CutoffTooSmall"), std::string::npos);
  EXPECT_EQ(invoke_json({"hmr", "--model", "p237", "--trunc", "7"})["total_dim"], 3);
}

TEST(Cli, SkeinFixture) {
  const auto j = invoke_json({"skein", "--corpus", "p237", "--crossing", "0"});
  EXPECT_EQ(j["dets"], nlohmann::json::parse("[1, 11, 10]"));
  EXPECT_EQ(j["triangle"]["pass"], true);
  EXPECT_EQ(j["triangle"]["dims"], nlohmann::json::parse("[3, 11, 10]"));
  // the fixture records the crossing, so --crossing may be omitted
  EXPECT_EQ(invoke_json({"skein", "--corpus", "p237"})["dets"], j["dets"]);
}

TEST(Cli, SkeinErrors) {
  const auto r = invoke({"skein", "--corpus", "unknot"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NoCrossings"), std::string::npos);
  EXPECT_NE(invoke({"skein", "--corpus", "trefoil", "--crossing", "9"}).err.find("CrossingOutOfRange"),
            std::string::npos);
  EXPECT_EQ(invoke({"skein", "--corpus", "trefoil"}).code, 2);
}

TEST(Cli, TriangleDims) {
  const auto fail = invoke_json({"skein", "--dims", "3,1,1"});
  EXPECT_EQ(fail["pass"], false);
  EXPECT_FALSE(fail["violations"].empty());
  EXPECT_EQ(invoke_json({"skein", "--dims", "3,11,10"})["pass"], true);
  EXPECT_EQ(invoke_json({"skein", "--dims", "1,1,1"})["pass"], false);
  // a failed check is a result, not an error
  EXPECT_EQ(invoke({"skein", "--dims", "3,1,1"}).code, 0);
  EXPECT_EQ(invoke({"skein", "--dims", "3,1"}).code, 2);
}

TEST(Cli, ConfigValidation) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate", "--corpus", "trefoil"}).code, 2);
  EXPECT_EQ(invoke({"khr"}).code, 2);
  EXPECT_EQ(invoke({"khr", "--corpus", "trefoil", "--pd", "x.txt"}).code, 2);
  EXPECT_EQ(invoke({"det", "--corpus", "trefoil", "--page", "2"}).code, 2);
  EXPECT_EQ(invoke({"khr", "--model", "p237"}).code, 2);
  EXPECT_EQ(invoke({"hmr", "--corpus", "trefoil"}).code, 2);
  EXPECT_EQ(invoke({"khr", "--corpus", "no_such_knot"}).code, 2);
  EXPECT_NE(invoke({"khr", "--corpus", "no_such_knot"}).err.find("UnknownDiagram"), std::string::npos);
  EXPECT_EQ(invoke({"khr", "--corpus", "trefoil", "--corpus-file", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, Deterministic) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"khr", "--corpus", "7_2", "--json"}, {"ss", "--corpus", "figure_eight", "--json"},
        {"hmr", "--model", "p237", "--json", "--chi"}, {"skein", "--corpus", "p237", "--json"},
        {"h1", "--corpus", "L10a18", "--json"}}) {
    const auto a = invoke(args), b = invoke(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(nlohmann::json::parse(a.out)["schema"], 1);
  }
}
