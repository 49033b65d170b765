#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "lhdeform/experiment.hpp"
#include "lhdeform/ode.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

class Workspace {
 public:
  Workspace() {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("lhdeform-cli-" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }

  Run run(const std::string& args) const {
    const std::string cmd = std::string(LHDEFORM_CLI) + " " + args + " > " + path("stdout").string() + " 2> " +
                            path("stderr").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read("stdout"), read("stderr")};
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  fs::path dir_;
};

const char* kDeformed = R"({"version": 1, "system": "h4-deformed-prolonged", "z": 0.5,
  "coefficients": {"b1": 1, "b2": [{"type": "monomial", "c": 1, "power": 1}], "b3": [{"type": "sinusoid", "c": 1}]},
  "initial": [-0.5, 1, -1, -0.5, -1.5, 0.5], "tspan": [0, 2], "samples": 50})";

const char* kUndeformed = R"({"version": 1, "system": "h4-prolonged",
  "coefficients": {"b1": 1, "b2": [{"type": "monomial", "c": 1, "power": 1}], "b3": [{"type": "sinusoid", "c": 1}]},
  "initial": [-0.5, 1, -1, -0.5, -1.5, 0.5], "tspan": [0, 2], "samples": 50})";

}  // namespace

TEST_CASE("integrate") {
  Workspace w;
  SUBCASE("zero coefficients give a constant trajectory") {
    const auto cfg = w.write("c.json", R"({"version": 1, "system": "h4", "initial": [0.3, -0.2], "tspan": [0, 3]})");
    const Run r = w.run("integrate --config " + cfg.string() + " --out " + w.path("o").string());
    CHECK(r.code == 0);
    std::ifstream in(w.path("o/trajectory.csv"));
    const auto table = lhdeform::read_csv(in);
    for (const auto& s : table.states) CHECK(s == std::vector<double>{0.3, -0.2});
    CHECK(Json::parse(r.out)["final_state"] == Json::parse("[0.3, -0.2]"));
  }
  SUBCASE("deformed prolonged flow writes six state columns") {
    const auto cfg = w.write("c.json", kDeformed);
    CHECK(w.run("integrate --config " + cfg.string() + " --out " + w.path("o").string()).code == 0);
    std::ifstream in(w.path("o/trajectory.csv"));
    const auto table = lhdeform::read_csv(in);
    CHECK(table.header.size() == 7);
    CHECK(table.times.back() == 2.0);
    CHECK_FALSE(fs::exists(w.path("o/trajectory.csv.tmp")));
  }
  SUBCASE("identical config gives identical bytes") {
    const auto cfg = w.write("c.json", kDeformed);
    w.run("integrate --config " + cfg.string() + " --out " + w.path("a").string());
    w.run("integrate --config " + cfg.string() + " --out " + w.path("b").string());
    CHECK(w.read("a/trajectory.csv") == w.read("b/trajectory.csv"));
  }
  SUBCASE("config errors exit 2") {
    const auto bad = w.write("bad.json", R"({"version": 1, "system": "nope", "initial": [0, 0], "tspan": [0, 1]})");
    const Run r = w.run("integrate --config " + bad.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("nope") != std::string::npos);
    CHECK(w.run("integrate").code == 2);
    CHECK(w.run("frobnicate").code == 2);
    CHECK(w.run("integrate --config " + w.path("missing.json").string()).code == 2);
  }
}

TEST_CASE("constants") {
  Workspace w;
  SUBCASE("static points") {
    const Run r = w.run("constants --points '[[[2,3],[1,0],[0,1]]]' --out " + w.path("o").string());
    REQUIRE(r.code == 0);
    const Json j = Json::parse(w.read("o/constants.json"));
    const Json& v = j["rows"][0]["values"];
    CHECK(v["F2"] == 3.0);
    CHECK(v["F13"] == -1.0);
    CHECK(v["F23"] == 4.0);
    CHECK(v["F3"] == 6.0);
  }
  SUBCASE("deformed constants omit F23") {
    const Run r = w.run("constants --points '[[2,3,1,0,0,1]]' --z 0.5 --out " + w.path("o").string());
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK_FALSE(j["rows"][0]["values"].contains("F23"));
    CHECK(j["constants"].size() == 3);
  }
  SUBCASE("trajectory input gives the drift summary") {
    const auto cfg = w.write("c.json", kDeformed);
    w.run("integrate --config " + cfg.string() + " --out " + w.path("o").string());
    const Run r = w.run("constants --config " + cfg.string() + " --trajectory " + w.path("o/trajectory.csv").string() +
                        " --out " + w.path("o").string());
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    for (const auto& n : {"F2", "F13", "F3"}) CHECK(j["drift"][n].get<double>() <= 1e-6);
  }
  SUBCASE("arity mismatch") {
    CHECK(w.run("constants --points '[[1,2,3,4]]'").code == 2);
  }
}

TEST_CASE("superpose") {
  Workspace w;
  SUBCASE("undeformed demo") {
    const auto cfg = w.write("c.json", kUndeformed);
    const Run r = w.run("superpose --config " + cfg.string() + " --out " + w.path("o").string());
    REQUIRE(r.code == 0);
    const Json j = Json::parse(w.read("o/superposition.json"));
    CHECK(j["max_error"].get<double>() <= 1e-6);
    std::ifstream in(w.path("o/superposition.csv"));
    CHECK(lhdeform::read_reconstruction_csv(in).rows.size() == 50);
  }
  SUBCASE("deformed demo at z = 0.3") {
    const auto cfg = w.write("c.json", kDeformed);
    const Run r = w.run("superpose --config " + cfg.string() + " --z 0.3 --out " + w.path("o").string());
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["max_error"].get<double>() <= 1e-6);
  }
  SUBCASE("explicit wrong branch is honoured") {
    const auto cfg = w.write("c.json", kUndeformed);
    const Run r = w.run("superpose --config " + cfg.string() + " --branch plus --out " + w.path("o").string());
    CHECK(Json::parse(r.out)["branch"] == "plus");
    CHECK(w.run("superpose --config " + cfg.string() + " --branch sideways").code == 2);
  }
  SUBCASE("y2 = y3 is recorded per sample") {
    const auto cfg = w.write("c.json", R"({"version": 1, "system": "h4-prolonged",
      "coefficients": {"b1": 1, "b2": 1, "b3": 1}, "initial": [[-0.5, 1], [-1, 0.5], [-1.5, 0.5]],
      "tspan": [0, 1], "samples": 5})");
    const Run r = w.run("superpose --config " + cfg.string() + " --out " + w.path("o").string());
    CHECK(r.code == 1);
    const Json j = Json::parse(w.read("o/superposition.json"));
    CHECK(j["failures"] == 5);
    CHECK(j["failure_records"].size() == 5);
    CHECK(j["failure_records"][0]["error"].get<std::string>().find("y2 = y3") != std::string::npos);
  }
}

TEST_CASE("verify and limit-scan") {
  Workspace w;
  const Run r = w.run("verify --suite 'bracket.*' --out " + w.path("o").string());
  CHECK(r.code == 0);
  const Json j = Json::parse(w.read("o/verify.json"));
  CHECK(j["total"] == 8);
  for (const auto& c : j["checks"]) CHECK(c["check_id"].get<std::string>().rfind("bracket.", 0) == 0);
  CHECK(w.run("verify --suite 'nothing.*'").code == 2);

  w.run("verify --suite 'limit.*,bracket.*' --seed 3 --out " + w.path("a").string());
  w.run("verify --suite 'limit.*,bracket.*' --seed 3 --out " + w.path("b").string());
  CHECK(w.read("a/verify.json") == w.read("b/verify.json"));

  const Run l = w.run("limit-scan --family 'fz*' --out " + w.path("o").string());
  CHECK(l.code == 0);
  CHECK(Json::parse(w.read("o/limit_scan.json"))["total"] == 3);
  CHECK(w.run("limit-scan --family fz3 --z-grid 1e-4,1e-3").code == 2);
  CHECK(w.run("limit-scan --family none").code == 2);
}
