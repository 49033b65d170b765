#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lhdeform/config.hpp"

using namespace lhdeform;
using Json = nlohmann::ordered_json;

namespace {

Json base() {
  return Json::parse(R"({
    "version": 1,
    "system": "h4-deformed-prolonged",
    "z": 0.5,
    "coefficients": {"b1": 1, "b2": [{"type": "monomial", "c": 1, "power": 1}],
                     "b3": [{"type": "sinusoid", "c": 1}]},
    "initial": [[-0.5, 1], [-1, -0.5], [-1.5, 0.5]],
    "tspan": [0, 5],
    "integrator": {"rel_tol": 1e-11, "abs_tol": 1e-12},
    "samples": 20,
    "seed": 7
  })");
}

}  // namespace

TEST_CASE("valid config") {
  const ExperimentConfig c = parse_config(base());
  CHECK(c.flow.system == "h4-deformed-prolonged");
  CHECK(c.flow.z == 0.5);
  CHECK(c.initial == PhasePoint{-0.5, 1, -1, -0.5, -1.5, 0.5});
  CHECK(c.flow.coefficients.b2(3.0) == 3.0);
  CHECK(c.flow.coefficients.b3(1.0) == doctest::Approx(std::sin(1.0)));
  CHECK(c.integrator.rel_tol == 1e-11);
  CHECK(c.samples == 20);
  CHECK(c.seed == 7);
  const ExperimentConfig again = parse_config(to_json(c));
  CHECK(to_json(again).dump() == to_json(c).dump());
}

TEST_CASE("bernoulli config") {
  Json j = base();
  j["system"] = "bernoulli-prolonged";
  CHECK_THROWS_AS(parse_config(j), ConfigError);  // missing s, plane coefficients
  j["s"] = 3;
  j["coefficients"] = Json::parse(R"({"a1": 0.3, "a2": [{"type": "sinusoid", "c": 1, "omega": 1, "phase": 0}]})");
  j["initial"] = Json::parse("[1, 0.5, 0.8, 0.9, 1.2, 1.2]");
  const ExperimentConfig c = parse_config(j);
  CHECK(c.flow.s == 3);
  CHECK(c.flow.a1(0.0) == 0.3);
}

TEST_CASE("rejections") {
  auto rejects = [](const std::function<void(Json&)>& edit) {
    Json j = base();
    edit(j);
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  };
  rejects([](Json& j) { j["extra"] = 1; });
  rejects([](Json& j) { j.erase("version"); });
  rejects([](Json& j) { j["version"] = 2; });
  rejects([](Json& j) { j["system"] = "nope"; });
  rejects([](Json& j) { j["s"] = 3; });
  rejects([](Json& j) { j["initial"] = Json::parse("[1, 2]"); });
  rejects([](Json& j) { j["tspan"] = Json::parse("[1, 1]"); });
  rejects([](Json& j) { j["coefficients"]["a1"] = 1; });
  rejects([](Json& j) { j["coefficients"]["b2"][0]["shift"] = 1; });
  rejects([](Json& j) { j["coefficients"]["b2"][0]["power"] = -1; });
  rejects([](Json& j) { j["coefficients"]["b2"][0]["type"] = "cosine"; });
  rejects([](Json& j) { j["integrator"]["rel_tol"] = 0; });
  rejects([](Json& j) { j["integrator"]["order"] = 5; });
  rejects([](Json& j) { j["samples"] = 1; });
  rejects([](Json& j) {
    j["system"] = "b2";
    j["initial"] = Json::parse("[0, 0]");
  });  // book system with b1
}

TEST_CASE("load from disk") {
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
