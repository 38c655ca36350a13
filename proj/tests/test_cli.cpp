#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hyperdyn_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome run(const std::string& args) {
  static int counter = 0;
  const fs::path dir = scratch("run" + std::to_string(counter++));
  const std::string cmd = std::string("\"") + HYPERDYN_CLI + "\" " + args + " > \"" + (dir / "out").string() +
                          "\" 2> \"" + (dir / "err").string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(dir / "out");
  o.err = slurp(dir / "err");
  return o;
}

std::string cfg(const std::string& name) { return "\"" + testing::config_path(name) + "\""; }

}  // namespace

TEST_CASE("validate accepts the reference config", "[cli]") {
  const Outcome o = run("validate " + cfg("reference"));
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(o.out);
  CHECK(doc.contains("manifest"));
  CHECK(doc["manifest"]["command"] == "validate");
  CHECK(doc["manifest"]["tool_version"] == hyperdyn::kToolVersion);
  CHECK(doc["manifest"]["config_digest"].get<std::string>().size() == 16);
  CHECK_FALSE(doc["manifest"].contains("wall_time_s"));
}

TEST_CASE("overlapping disks exit with the geometry code", "[cli]") {
  const Outcome o = run("validate " + cfg("overlapping"));
  CHECK(o.code == 2);
  CHECK(o.err.find("generators[0]") != std::string::npos);
}

TEST_CASE("Fuchsian configs validate with a warning", "[cli]") {
  const Outcome o = run("validate " + cfg("fuchsian"));
  CHECK(o.code == 0);
  CHECK(o.err.find("Fuchsian") != std::string::npos);
}

TEST_CASE("usage and config errors exit with code 1", "[cli]") {
  CHECK(run("").code == 1);
  CHECK(run("delta /nonexistent.json").code == 1);
  CHECK(run("mix " + cfg("reference") + " --f tan:1").code == 1);
}

TEST_CASE("delta of a rank one scheme is zero", "[cli]") {
  const Outcome o = run("delta " + cfg("rank1"));
  REQUIRE(o.code == 0);
  CHECK(nlohmann::json::parse(o.out)["delta"] == 0.0);
}

TEST_CASE("equidist k = 0 column equals the counts", "[cli]") {
  const fs::path dir = scratch("equidist");
  const Outcome o = run("equidist " + cfg("reference") + " --max-len 8 --k-max 2 --out \"" + dir.string() + "\"");
  REQUIRE(o.code == 0);
  std::istringstream csv(slurp(dir / "equidist.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("T,N,li,ratio,S0,", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() >= 5);
    CHECK(std::stod(cells[1]) == std::stod(cells[4]));
    ++rows;
  }
  CHECK(rows > 0);
  CHECK(fs::exists(dir / "equidist.json"));
}

TEST_CASE("mix output is reproducible and independent of workers", "[cli]") {
  const std::string base = "mix " + cfg("reference") + " --samples 3000 --t-max 4 --depth 5";
  const fs::path d1 = scratch("mix1"), d2 = scratch("mix2"), d3 = scratch("mix3");
  const Outcome a = run(base + " --workers 1 --out \"" + d1.string() + "\"");
  const Outcome b = run(base + " --workers 1 --out \"" + d2.string() + "\"");
  const Outcome c = run(base + " --workers 4 --out \"" + d3.string() + "\"");
  REQUIRE(a.code == b.code);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(slurp(d1 / "mix.csv") == slurp(d2 / "mix.csv"));
  CHECK(slurp(d1 / "mix.csv") == slurp(d3 / "mix.csv"));
  CHECK(slurp(d1 / "mix.csv").rfind("t,re,im,stderr\n", 0) == 0);
}

TEST_CASE("geodesic counts past the horizon warn", "[cli]") {
  const Outcome o = run("geodesics " + cfg("reference") + " --max-len 5 --T 100");
  REQUIRE(o.code == 0);
  CHECK(o.err.find("horizon") != std::string::npos);
  const auto doc = nlohmann::json::parse(o.out);
  CHECK_FALSE(doc["warnings"].empty());
}

TEST_CASE("scan flags the trivial twist and is symmetric", "[cli]") {
  const fs::path dir = scratch("scan");
  const Outcome o = run("scan " + cfg("reference") +
                        " --depth 4 --b-min -2.5 --b-max 2.5 --b-step 2.5 --k-max 1 --iters 100 --out \"" +
                        dir.string() + "\"");
  REQUIRE(o.code == 0);
  std::istringstream csv(slurp(dir / "scan.csv"));
  std::string line;
  std::getline(csv, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) header.push_back(c);
  }
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  REQUIRE(col("flagged") < header.size());
  std::map<std::pair<int, double>, double> rho;
  std::map<std::pair<int, double>, std::string> flag;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const auto key = std::make_pair(std::stoi(cells[col("k")]), std::stod(cells[col("b")]));
    rho[key] = std::stod(cells[col("rho_est")]);
    flag[key] = cells[col("flagged")];
  }
  CHECK(rho.size() == 9);
  CHECK(flag[{0, 0.0}] == "1");
  CHECK(flag[{1, 0.0}] == "0");
  for (const auto& [key, value] : rho) CHECK(std::abs(value - rho[{-key.first, -key.second}]) < 1e-8);
}

TEST_CASE("every command emits one JSON object", "[cli]") {
  const std::string r = cfg("reference");
  for (const std::string& cmd :
       {"delta " + r + " --depth 4", "measure " + r + " --depth 4 --centers 10 --scales 6 --ncp-samples 4",
        "nli " + r + " --grid 8", "laplace " + r + " --depth 4 --samples 2000",
        "ly " + r + " --depth 4 --pairs 8"}) {
    const Outcome o = run(cmd);
    INFO(cmd << "\n" << o.err);
    REQUIRE(o.code == 0);
    const auto doc = nlohmann::json::parse(o.out);
    CHECK(doc.is_object());
    CHECK(doc.contains("manifest"));
  }
  const Outcome timed = run("delta " + r + " --depth 4 --timing");
  CHECK(nlohmann::json::parse(timed.out)["manifest"].contains("wall_time_s"));
}
