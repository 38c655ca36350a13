#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace hyperdyn;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("reference config parses with its defaults", "[io]") {
  const Config cfg = load_config(testing::config_path("reference"));
  REQUIRE(cfg.generators.size() == 2);
  CHECK(cfg.generators[0].twist == 0.7);
  CHECK(cfg.defaults.depth == 6);
  CHECK(cfg.defaults.max_word_length == 10);
}

TEST_CASE("twist is optional", "[io]") {
  const Config cfg = parse_config(
      R"({"generators": [{"source": {"center": [-2, 0], "radius": 0.5}, "target": {"center": [2, 0], "radius": 0.5}}]})");
  CHECK(cfg.generators[0].twist == 0.0);
}

TEST_CASE("schema errors name the field", "[io]") {
  CHECK(message_of(R"({"generators": [{"source": {"center": [0, 0], "radius": 1},
                                        "target": {"center": [3, 0]}}]})")
            .find("generators[0].target.radius") != std::string::npos);
  CHECK(message_of(R"({"generators": [{"source": {"center": [0], "radius": 1},
                                        "target": {"center": [3, 0], "radius": 1}}]})")
            .find("generators[0].source.center") != std::string::npos);
  CHECK(message_of(R"({"gens": []})").find("generators") != std::string::npos);
  CHECK(message_of(R"({"generators": [{"source": {"center": [0, 0], "radius": 1},
                                        "target": {"center": [3, 0], "radius": 1}}],
                       "defaults": {"depth": -2}})")
            .find("defaults.depth") != std::string::npos);
}

TEST_CASE("syntax errors name the line", "[io]") {
  const std::string msg = message_of("{\n\"generators\": [\n  {,}\n]}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config digest ignores formatting and key order", "[io]") {
  const Config a = parse_config(R"({"generators": [{"twist": 0.1, "source": {"radius": 0.5, "center": [-2, 0]},
                                     "target": {"center": [2, 0], "radius": 0.5}}]})");
  const Config b = parse_config(
      R"({"generators":[{"source":{"center":[-2,0],"radius":0.5},"target":{"center":[2,0],"radius":0.5},"twist":0.1}]})");
  const Config c = parse_config(
      R"({"generators":[{"source":{"center":[-2,0],"radius":0.5},"target":{"center":[2,0],"radius":0.5},"twist":0.2}]})");
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a) != config_digest(c));
  CHECK(config_digest(a).size() == 16);
}

TEST_CASE("CSV output round-trips doubles", "[io]") {
  CsvWriter csv({"x", "n", "flag"});
  csv.row().add(0.1).add(std::size_t{3}).add(true);
  csv.row().add(-1e-300).add(-7).add(false);
  const std::string text = csv.str();
  CHECK(text.rfind("x,n,flag\n", 0) == 0);
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(text.find("0.10000000000000001,3,1\n") != std::string::npos);
  CHECK(text.find(",-7,0\n") != std::string::npos);
}
