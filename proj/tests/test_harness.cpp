#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kinslip/harness.hpp"

using namespace kinslip;

TEST_CASE("config validation: epsilon ordering, accommodation range, sizes") {
  RunConfig c;
  c.validate();
  c.epsilons = {0.05, 0.1};
  CHECK_THROWS(c.validate());
  c.epsilons = {0.1, 0.05};
  c.chi = 2.0;
  c.beta = 0.1;  // chi eps^beta = 2 * 0.1^0.1 = 1.59 > 1
  CHECK_THROWS(c.validate());
  c.chi = 1.0;
  c.beta = -1.0;
  CHECK_THROWS(c.validate());
  c.beta = 0.5;
  c.validate();
  c.epsilons = {};
  CHECK_THROWS(c.validate());
}

TEST_CASE("config json round trip") {
  namespace fs = std::filesystem;
  RunConfig c;
  c.experiment = "crosscheck";
  c.epsilons = {0.08, 0.04};
  c.model_kind = "bgk-constant-nu";
  c.nu0 = 3.0;
  c.seed = 99;
  fs::path p = fs::temp_directory_path() / "kinslip_cfg_test.json";
  {
    std::ofstream out(p);
    out << c.to_json();
  }
  RunConfig d = RunConfig::from_json_file(p.string());
  CHECK(d.experiment == "crosscheck");
  CHECK(d.epsilons.size() == 2);
  CHECK(d.nu0 == 3.0);
  CHECK(d.seed == 99);
  fs::remove(p);
}

TEST_CASE("run_convergence rejects degenerate single-epsilon configs") {
  RunConfig c;
  c.epsilons = {0.1};
  c.wall_law = "specular";
  CHECK_THROWS(run_convergence(c));
}

TEST_CASE("emit_outputs: deterministic bytes and exit codes") {
  namespace fs = std::filesystem;
  RunConfig c;
  c.output_dir = (fs::temp_directory_path() / "kinslip_emit_test").string();
  std::string csv = "a,b\n1,2\n";
  int rc = emit_outputs(c, "converge", {"t.csv"}, {csv}, "{\"x\": 1}", true);
  CHECK(rc == 0);
  auto read = [&](const std::string& name) {
    std::ifstream in(fs::path(c.output_dir) / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string first = read("t.csv");
  rc = emit_outputs(c, "converge", {"t.csv"}, {csv}, "{\"x\": 1}", false);
  CHECK(rc == 2);
  CHECK(read("t.csv") == first);  // identical config -> byte-identical output
  CHECK(read("converge_summary.json").find("provenance") != std::string::npos);
  fs::remove_all(c.output_dir);
}

TEST_CASE("empty results still produce a summary and exit 0") {
  namespace fs = std::filesystem;
  RunConfig c;
  c.output_dir = (fs::temp_directory_path() / "kinslip_empty_test").string();
  int rc = emit_outputs(c, "slip-coeffs", {}, {}, "{}", true);
  CHECK(rc == 0);
  CHECK(fs::exists(fs::path(c.output_dir) / "slip-coeffs_summary.json"));
  fs::remove_all(c.output_dir);
}

TEST_CASE("slab gradient helper: second-order one-sided rows") {
  SlabFields f;
  int n = 32;
  f.x.resize(n);
  f.resize(n);
  for (int j = 0; j < n; ++j) {
    f.x[j] = (j + 0.5) / n;
    f.u2[j] = 1.0 + 2.0 * f.x[j] + 3.0 * f.x[j] * f.x[j];
  }
  for (size_t j : {size_t(0), size_t(n / 2), size_t(n - 1)}) {
    FluidGradients g = slab_gradients(f, j);
    CHECK(g.grad_u[0][1] == doctest::Approx(2.0 + 6.0 * f.x[j]).epsilon(1e-10));
  }
}
