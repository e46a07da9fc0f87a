#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shadowkit/cli.hpp"

namespace fs = std::filesystem;
using Catch::Approx;
using nlohmann::json;

namespace {

const std::vector<std::string> kPB{"--a1=1", "--b1=0", "--c1=1", "--a2=4", "--b2=1", "--c2=1", "--L=1"};

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("shadowkit_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "shadowkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = shadowkit::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("analyze writes the closed-form quantities", "[cli]") {
  const fs::path d = fresh_dir("analyze");
  auto r = invoke(with({"analyze", "--out_dir=" + d.string()}, kPB));
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(d / "analysis.json"));
  CHECK(j["config"]["command"] == "analyze");
  CHECK(j["admissible"]["ordering"] == true);
  CHECK(j["constant_state"]["v_bar"].get<double>() == Approx(1.0));
  CHECK(j["constant_state"]["lambda_bar"].get<double>() == Approx(6.0));
  REQUIRE(j["eps_k"].size() == 8);
  CHECK(j["eps_k"][0]["eps"].get<double>() == Approx(0.0506606).epsilon(1e-6));
  CHECK(j["pitchfork"][0]["K2_chart"].get<double>() == Approx(-0.0200521).epsilon(1e-4));
  CHECK(j["pitchfork"][0]["K2"].get<double>() == Approx(-0.0390509).epsilon(1e-5));
  CHECK(j["pitchfork"][0]["direction"] == "left");
  CHECK(j["sign_chart"]["gamma"].get<double>() == Approx(14.0));
  CHECK(j["layer_targets"]["lambda0_bar"].get<double>() == Approx(6.0));
  CHECK(j["maxwell_lambda"].get<double>() == Approx(5.91911499346).epsilon(1e-10));
}

TEST_CASE("ordering failure exits with the model code", "[cli]") {
  const fs::path d = fresh_dir("ordering");
  auto r = invoke({"analyze", "--a1=2", "--b1=1", "--c1=0.2", "--a2=4", "--b2=2", "--c2=1", "--L=1",
                   "--out_dir=" + d.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("OrderingViolated") != std::string::npos);
  CHECK(r.err.find("B>A>C") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 1", "[cli]") {
  CHECK(invoke(with({"analyze", "--bogus=3"}, kPB)).code == 1);
  CHECK(invoke(with({"frobnicate"}, kPB)).code == 1);
  CHECK(invoke(with({"analyze", "--eps=-1"}, kPB)).code == 1);
  CHECK(invoke(with({"analyze", "--eps=abc"}, kPB)).code == 1);
  auto r = invoke(with({"branch", "--k=0"}, kPB));
  CHECK(r.code == 1);
  CHECK(r.err.find("key k") != std::string::npos);
}

TEST_CASE("config file with command-line overrides", "[cli]") {
  const fs::path d = fresh_dir("config");
  const fs::path cfg = d / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "a1=1\nb1=0\nc1=1\na2=4\nb2=1\nc2=1\nL=1\nlambda_points=5\n";
  }
  auto r = invoke({"maxwell", "--config", cfg.string(), "--lambda_points=7", "--out_dir=" + d.string()});
  REQUIRE(r.code == 0);
  std::ifstream f(d / "maxwell.csv");
  std::string line;
  int comments = 0, rows = 0;
  bool saw_points = false;
  while (std::getline(f, line)) {
    if (line.rfind("# ", 0) == 0) {
      ++comments;
      if (line == "# lambda_points=7") saw_points = true;
    } else {
      ++rows;
    }
  }
  CHECK(saw_points);
  CHECK(comments > 10);
  CHECK(rows == 8);

  std::ofstream(d / "bad.cfg") << "a1=1\nnot_a_key=2\n";
  CHECK(invoke({"maxwell", "--config", (d / "bad.cfg").string()}).code == 1);
}

TEST_CASE("output directory from the environment", "[cli]") {
  const fs::path d = fresh_dir("env");
  ::setenv("SHADOWKIT_OUT", d.string().c_str(), 1);
  auto r = invoke(with({"stability", "--eps=0.06"}, kPB));
  ::unsetenv("SHADOWKIT_OUT");
  REQUIRE(r.code == 0);
  const std::string s = slurp(d / "spectrum.csv");
  CHECK(s.find("index,real,imag\n") != std::string::npos);
  CHECK(s.rfind("# L=1\n", 0) == 0);
  CHECK(s.find("# command=stability\n") != std::string::npos);
  CHECK(s.find("# out_dir=" + d.string() + "\n") != std::string::npos);
}

TEST_CASE("detect and branch artifacts", "[cli]") {
  const fs::path d = fresh_dir("branch");
  REQUIRE(invoke(with({"detect", "--n=200", "--out_dir=" + d.string()}, kPB)).code == 0);
  const std::string det = slurp(d / "bifurcations.csv");
  CHECK(std::count(det.begin(), det.end(), '\n') > 3);
  REQUIRE(invoke(with({"branch", "--n=100", "--profiles=true", "--out_dir=" + d.string()}, kPB)).code == 0);
  const std::string br = slurp(d / "branch.csv");
  CHECK(br.find("s,eps,lambda,v_min,v_max,v0,vL,leading_eig,stable\n") != std::string::npos);
  CHECK(fs::exists(d / "branch_events.csv"));
  CHECK(fs::exists(d / "profiles" / "profile_0000.csv"));
}

TEST_CASE("layer report", "[cli]") {
  const fs::path d = fresh_dir("layer");
  auto r = invoke(with({"layer", "--x0=0.25", "--eps=1e-4", "--n=4000", "--out_dir=" + d.string()}, kPB));
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(d / "layer_report.json"));
  CHECK(j["lambda_eps"].get<double>() == Approx(6.0).margin(0.1));
  CHECK(j["layer_x"].get<double>() == Approx(0.25).margin(0.05));
  CHECK(j["maxwell_gap"].get<double>() == Approx(-0.074993).epsilon(1e-4));
  for (const char* key : {"sup_dev", "eps", "x0", "n"}) CHECK(j.contains(key));
  const std::string prof = slurp(d / "layer_profile.csv");
  CHECK(prof.find("x,v,V_eps,G_eps\n") != std::string::npos);
}

TEST_CASE("layer with an out-of-range position exits with the model code", "[cli]") {
  const fs::path d = fresh_dir("layer_bad");
  CHECK(invoke(with({"layer", "--x0=0.4", "--eps=1e-4", "--out_dir=" + d.string()}, kPB)).code == 2);
}

TEST_CASE("repeated runs of the executable are byte-identical", "[cli]") {
  const fs::path d = fresh_dir("determinism");
  std::string cmd = std::string("\"") + SHADOWKIT_EXE + "\" branch --n=100";
  for (const auto& a : kPB) cmd += " " + a;
  cmd += " --out_dir=\"" + d.string() + "\" 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string first = slurp(d / "branch.csv");
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(d / "branch.csv") == first);
  CHECK_FALSE(first.empty());
}
