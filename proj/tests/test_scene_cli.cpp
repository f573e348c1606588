#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nulldist/cli.hpp"
#include "nulldist/scene.hpp"
#include "support.hpp"

using namespace nulldist;
using json = nlohmann::json;

namespace {

const char* kFlatScene = R"({
  "schema": 1,
  "dim": 2,
  "spacetime": {"name": "minkowski"},
  "time_function": {"name": "coordinate"},
  "grid": {"lo": [-1, -1], "hi": [1, 1], "h": 0.05, "stencil_radius": 2},
  "queries": {"pairs": [{"p": [0, 0], "q": [0, 1]}]},
  "outputs": {"pairs": "pairs.json"}
})";

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::path(testing::TempDir()) / name;
  std::ofstream(path) << text;
  return path.string();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run ndist(std::vector<std::string> args) {
  args.insert(args.begin(), "ndist");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Scene, RoundTrip) {
  const Scene s = parse_scene(kFlatScene);
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.pairs.size(), 1u);
  EXPECT_EQ(parse_scene(emit_scene(s)), s);
}

TEST(Scene, NestedConformalSpacetime) {
  const Scene s = parse_scene(R"({"schema": 1, "dim": 2, "spacetime": {"name": "conformal",
      "params": {"phi": 2}, "base": {"name": "upper_half_minkowski"}}})");
  ASSERT_TRUE(s.spacetime.base);
  EXPECT_EQ(parse_scene(emit_scene(s)), s);
  const auto st = make_spacetime(s);
  EXPECT_EQ(st.metric_unchecked(vec({1, 0}))(0, 0), -4.0);
}

TEST(Scene, Rejections) {
  EXPECT_ERRC(parse_scene(R"({"schema": 1, "dim": 2, "spacetime": {"name": "minkowski"},
                              "colour": 3})"),
              Errc::SceneParse);
  EXPECT_ERRC(parse_scene(R"({"schema": 2, "dim": 2, "spacetime": {"name": "minkowski"}})"),
              Errc::SceneParse);
  EXPECT_ERRC(parse_scene(R"({"schema": 1, "dim": 2, "spacetime": {"name": "minkowski"},
                              "grid": {"lo": [0, 0, 0], "hi": [1, 1, 1]}})"),
              Errc::SceneParse);
  try {
    parse_scene("{\n  \"schema\": 1,\n  \"dim\": ,\n}");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3, column"), std::string::npos) << e.what();
  }
}

TEST(Scene, TimeFunctions) {
  Scene s = parse_scene(kFlatScene);
  const auto st = make_spacetime(s);
  s.time = {"affine", {{"a", 2.0}, {"b", 1.0}}};
  EXPECT_EQ(make_time_function(s, st)(vec({1, 0})), 3.0);
  s.time = {"sundial", {}};
  EXPECT_ERRC(make_time_function(s, st), Errc::UnknownName);
}

TEST(Cli, NulldistJsonIsDeterministic) {
  const auto scene = write_temp("flat.json", kFlatScene);
  const auto a = ndist({"nulldist", scene, "--p", "0,0", "--q", "0,1"});
  const auto b = ndist({"nulldist", scene, "--p", "0,0", "--q", "0,1", "--threads", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  auto ja = json::parse(a.out);
  auto jb = json::parse(b.out);
  EXPECT_NEAR(ja["estimate"].get<double>(), 1.0, 0.05);
  ja.erase("wall_ms");
  jb.erase("wall_ms");
  EXPECT_EQ(ja, jb);
}

TEST(Cli, SeedIsReported) {
  const auto scene = write_temp("upper.json", R"({"schema": 1, "dim": 2,
      "spacetime": {"name": "minkowski"},
      "grid": {"lo": [0.5, -0.5], "hi": [1.5, 0.5], "h": 0.1}})");
  const auto r = ndist({"check-antilip", scene, "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["seed"], 9);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(ndist({"nulldist"}).code, 2);
  EXPECT_EQ(ndist({"frobnicate"}).code, 2);
  const auto bad = write_temp("bad.json", "{\"schema\": 1,");
  const auto r = ndist({"nulldist", bad, "--p", "0,0", "--q", "0,1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line"), std::string::npos);
  const auto scene = write_temp("flat2.json", kFlatScene);
  EXPECT_EQ(ndist({"nulldist", scene, "--p", "0.013,0", "--q", "0,1"}).code, 1);
}

TEST(Cli, HelpListsPresets) {
  const auto r = ndist({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const auto& name : cli::preset_names()) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
}

TEST(Cli, Fmt12) {
  EXPECT_EQ(cli::fmt12(0.1 + 0.2), "0.3");
  EXPECT_EQ(cli::r12(1.0 / 3.0), 0.333333333333);
}
