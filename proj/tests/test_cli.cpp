#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tfairy/cli.hpp"

using namespace tfairy;
namespace fs = std::filesystem;

namespace {

std::string cauchy_zero_config() {
  return R"({
    "problem": "cauchy",
    "alpha": 0.5,
    "graph": {"k": 1, "m": 1, "a": [1.0, 1.0], "B": [[2.0]]},
    "grids": {"t_end": 0.25, "n_steps": 16, "n_x": 48, "truncation_radius": 3.0},
    "data": {
      "u0": [{"type": "zero"}, {"type": "zero"}],
      "f": [{"type": "zero"}, {"type": "zero"}]
    },
    "output": {"field_csv": "field.csv", "summary": "summary.json"}
  })";
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate_config reports addressable problems") {
  {
    const auto r = cli::validate_config("{ not json");
    CHECK(!r.ok());
  }
  {
    const auto r = cli::validate_config(R"({"problem":"cauchy"})");
    CHECK(!r.ok());
    bool saw_alpha = false;
    for (const auto& e : r.errors) saw_alpha |= e.find("alpha") != std::string::npos;
    CHECK(saw_alpha);
  }
  {
    auto text = cauchy_zero_config();
    auto pos = text.find("0.5");
    text.replace(pos, 3, "1.2");
    const auto r = cli::validate_config(text);
    CHECK(!r.ok());
    bool saw_range = false;
    for (const auto& e : r.errors)
      saw_range |= e.find("(0,1)") != std::string::npos;
    CHECK(saw_range);
  }
  {
    // B must be m x k.
    auto text = cauchy_zero_config();
    auto pos = text.find("[[2.0]]");
    text.replace(pos, 7, "[[2.0],[1.0]]");
    const auto r = cli::validate_config(text);
    CHECK(!r.ok());
    bool saw_b = false;
    for (const auto& e : r.errors)
      saw_b |= e.find("m x k") != std::string::npos;
    CHECK(saw_b);
  }
  {
    const auto r = cli::validate_config(cauchy_zero_config());
    REQUIRE(r.ok());
    CHECK(r.config->problem == "cauchy");
    CHECK(r.config->n_steps == 16);
  }
  {
    // ibvp requires lengths.
    auto text = cauchy_zero_config();
    auto pos = text.find("cauchy");
    text.replace(pos, 6, "ibvp");
    const auto r = cli::validate_config(text);
    CHECK(!r.ok());
  }
}

TEST_CASE("zero-data run: exit 0, zero residuals, reproducible bytes") {
  const auto parsed = cli::validate_config(cauchy_zero_config());
  REQUIRE(parsed.ok());
  const fs::path dir1 = fs::temp_directory_path() / "tfairy_cli_test_a";
  const fs::path dir2 = fs::temp_directory_path() / "tfairy_cli_test_b";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  cli::RunOptions o1, o2;
  o1.out_dir = dir1.string();
  o2.out_dir = dir2.string();
  CHECK(cli::run(*parsed.config, o1) == 0);
  CHECK(cli::run(*parsed.config, o2) == 0);
  const auto s1 = slurp(dir1 / "summary.json");
  CHECK(s1.find("\"pde_residual_max\": 0.0") != std::string::npos);
  CHECK(s1.find("artifact") != std::string::npos);
  CHECK(slurp(dir1 / "field.csv") == slurp(dir2 / "field.csv"));
  CHECK(s1 == slurp(dir2 / "summary.json"));
  const auto csv = slurp(dir1 / "field.csv");
  CHECK(csv.rfind("bond_id,x,t,u\n", 0) == 0);
}

TEST_CASE("hypothesis violation exits with code 2") {
  auto text = cauchy_zero_config();
  const auto pos = text.find("[[2.0]]");
  auto t2 = text;
  t2.replace(pos, 7, "[[0.5]]");
  const auto parsed = cli::validate_config(t2);
  REQUIRE(parsed.ok());
  cli::RunOptions o;
  o.out_dir = (fs::temp_directory_path() / "tfairy_cli_test_c").string();
  CHECK(cli::run(*parsed.config, o) == 2);
}

TEST_CASE("random-graph determinant sweep stays nondegenerate") {
  const double worst = cli::det_sweep(12345, 25, true);
  CHECK(worst > 1e-8);
}
