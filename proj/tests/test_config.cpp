#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "itee/config.hpp"
#include "itee/errors.hpp"

using namespace itee;

namespace {

const char* kMinimal = R"(name: tiny
grid:
  dim: 1
  n: [5]
material:
  c2: [[1.0]]
  chi_diel: [[1.0]]
)";

}  // namespace

TEST_CASE("every shipped config round-trips through the emitter") {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(ITEE_CONFIG_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    CAPTURE(e.path().string());
    const Config c = parse_config(e.path().string());
    const std::string text = emit_config(c);
    const Config back = parse_config_string(text, "emitted");
    CHECK(back == c);
    CHECK(emit_config(back) == text);
    ++count;
  }
  CHECK(count >= 5);
}

TEST_CASE("defaults") {
  const Config c = parse_config_string(kMinimal);
  CHECK(c.scenario.name == "tiny");
  CHECK(c.scenario.material.kappa_cond(0, 0) == 1.0);
  CHECK(c.scenario.bias.theta_c == c.scenario.material.theta_ref);
  for (const auto& p : c.scenario.grid.partitions) {
    CHECK(p.essential.size() == 2);
    CHECK(p.natural.empty());
  }
  CHECK(c.verification.p == std::vector<double>{1.0, 2.0, 4.0});
}

TEST_CASE("Voigt expansion of a 2-D stiffness") {
  const Config c = parse_config_string(R"(grid: {dim: 2, n: [3, 3]}
material:
  c2: [[4, 1, 0], [1, 3, 0], [0, 0, 0.5]]
  chi_diel: [[1, 0], [0, 1]]
  e_piezo: [[0, 0, 0.2], [0.1, 0.3, 0]]
)");
  const auto& m = c.scenario.material;
  CHECK(m.c2(0, 0, 0, 0) == 4.0);
  CHECK(m.c2(0, 0, 1, 1) == 1.0);
  CHECK(m.c2(0, 1, 0, 1) == 0.5);
  CHECK(m.c2(1, 0, 0, 1) == 0.5);
  CHECK(m.e_piezo(0, 0, 1) == 0.2);
  CHECK(m.e_piezo(0, 1, 0) == 0.2);
  CHECK(m.e_piezo(1, 1, 1) == 0.3);
  CHECK(voigt(1, 0, 2) == 2);
  CHECK(voigt_size(1) == 1);
}

TEST_CASE("unknown keys are reported with their line") {
  try {
    parse_config_string(std::string(kMinimal) + "integrator:\n  dt: 0.1\n  stepz: 3\n", "cfg");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 10);
    CHECK(e.key() == "integrator.stepz");
    CHECK(std::string(e.what()).find("cfg:10") == 0);
  }
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config_string("grid: [1, 2"), ParseError);
  CHECK_THROWS_AS(parse_config_string("material: {c2: [[1]], chi_diel: [[1]]}\n"), ParseError);
  CHECK_THROWS_AS(parse_config_string(std::string(kMinimal) + "integrator: {dt: fast}\n"), ParseError);
  CHECK_THROWS_AS(parse_config("/nonexistent/config.yaml"), Error);
}

TEST_CASE("invariants are checked after parsing") {
  CHECK_THROWS_AS(parse_config_string(R"(grid:
  dim: 1
  n: [5]
  partitions:
    mechanical: {essential: [left], natural: [left, right]}
material: {c2: [[1]], chi_diel: [[1]]}
)"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config_string(R"(grid:
  dim: 1
  n: [5]
  partitions:
    mechanical: {essential: [left], natural: [right]}
material: {c2: [[1]], chi_diel: [[1]]}
action:
  boundary: [{face: left, kind: traction, value: [1.0]}]
)"),
                  PartitionMismatch);
  CHECK_THROWS_AS(parse_config_string(std::string(kMinimal) + "integrator: {dt: -1}\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_string("grid: {dim: 1, n: [5]}\nmaterial: {c2: [[1]], chi_diel: [[1]], rho0: -1}\n"),
                  InvalidMaterial);
  CHECK_THROWS_AS(parse_config_string(std::string(kMinimal) + "verification: {p: [1, -2]}\n"), ValidationError);
}
