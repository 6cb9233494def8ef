#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "otto/grid_density.hpp"
#include "otto/potential.hpp"

namespace {

std::string g_otto_binary;

int run_cmd(const std::string& args, const std::string& log_file) {
  std::string cmd = g_otto_binary + " " + args + " > " + log_file + " 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_config(const std::string& path, const std::string& body) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  out << body;
}

const char* kSmallFlowConfig =
    "potential.kind = quadratic\n"
    "potential.theta = 0.25\n"
    "init.kind = gaussian\n"
    "init.mean = 1\n"
    "init.var = 2\n"
    "grid.n = 1024\n"
    "horizon = 0.05\n"
    "dt_pde = 1e-3\n"
    "save_stride_pde = 5\n";

}  // namespace

TEST_CASE("flow command writes diagnostics with the oracle entropy at t=0") {
  write_config("t_cli/flow.cfg", kSmallFlowConfig);
  REQUIRE(run_cmd("flow --config t_cli/flow.cfg --out t_cli/flow_out", "t_cli/flow.log") == 0);
  std::string csv = slurp("t_cli/flow_out/flow_diagnostics.csv");
  REQUIRE(!csv.empty());
  CHECK(csv.rfind("t,H,I,F,dHdt_fd,W2_rate,half_sqrtI", 0) == 0);
  std::istringstream ss(csv);
  std::string header, first;
  std::getline(ss, header);
  std::getline(ss, first);
  auto comma = first.find(',');
  double h0 = std::stod(first.substr(comma + 1));
  CHECK(h0 == doctest::Approx(-0.26551).epsilon(1e-3 / 0.26551));
  CHECK(std::filesystem::exists("t_cli/flow_out/snapshots/index.csv"));
}

TEST_CASE("stationary configuration keeps H and I at zero") {
  otto::Grid g{-10.0, 10.0, 1024};
  otto::Potential norm = otto::Potential::quadratic(0.25, 0.25 * std::log(2.0 * M_PI));
  std::vector<double> q(g.n);
  for (std::size_t i = 0; i < g.n; ++i) q[i] = norm.gibbs_density(g.node(i));
  otto::write_density_csv("t_cli/gibbs.csv", otto::normalize(g, std::move(q)));

  write_config("t_cli/stat.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "potential.c = 0.45946803583249203\n"
               "init.kind = grid\n"
               "init.file = t_cli/gibbs.csv\n"
               "grid.n = 1024\n"
               "horizon = 0.05\n"
               "dt_pde = 1e-3\n"
               "save_stride_pde = 10\n");
  REQUIRE(run_cmd("flow --config t_cli/stat.cfg --out t_cli/stat_out", "t_cli/stat.log") == 0);
  std::istringstream ss(slurp("t_cli/stat_out/flow_diagnostics.csv"));
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    std::istringstream row(line);
    std::string tok;
    std::getline(row, tok, ',');  // t
    std::getline(row, tok, ',');
    CHECK(std::fabs(std::stod(tok)) < 1e-4);  // H
    std::getline(row, tok, ',');
    CHECK(std::fabs(std::stod(tok)) < 1e-4);  // I
  }
}

TEST_CASE("missing potential kind names the key and exits nonzero") {
  write_config("t_cli/broken.cfg", "init.kind = gaussian\n");
  int rc = run_cmd("flow --config t_cli/broken.cfg --out t_cli/broken_out", "t_cli/broken.log");
  CHECK(rc == 2);
  CHECK(slurp("t_cli/broken.log").find("potential.kind") != std::string::npos);
}

TEST_CASE("unknown verification lists the available names") {
  write_config("t_cli/v.cfg", kSmallFlowConfig);
  int rc = run_cmd("verify --which bogus --config t_cli/v.cfg --out t_cli/v_out", "t_cli/v.log");
  CHECK(rc == 2);
  std::string log = slurp("t_cli/v.log");
  for (const char* name :
       {"de_bruijn", "wasserstein_slope", "steepest_descent", "hwi", "talagrand_lsi", "exp_decay",
        "time_reversal", "martingale", "fontbona_jourdain", "forward_identity",
        "trajectorial_rate"}) {
    CHECK(log.find(name) != std::string::npos);
  }
}

TEST_CASE("verify talagrand_lsi passes on the default gaussian experiment") {
  write_config("t_cli/tal.cfg", kSmallFlowConfig);
  int rc = run_cmd("verify --which talagrand_lsi --config t_cli/tal.cfg --out t_cli/tal_out",
                   "t_cli/tal.log");
  CHECK(rc == 0);
  CHECK(std::filesystem::exists("t_cli/tal_out/verification_report.csv"));
}

TEST_CASE("verify de_bruijn passes at production resolution") {
  write_config("t_cli/db.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "init.kind = gaussian\n"
               "init.mean = 1\n"
               "init.var = 2\n"
               "grid.n = 2048\n"
               "horizon = 0.4\n"
               "dt_pde = 2e-4\n"
               "save_stride_pde = 5\n");
  CHECK(run_cmd("verify --which de_bruijn --config t_cli/db.cfg --out t_cli/db_out",
                "t_cli/db.log") == 0);
}

TEST_CASE("negative control forces a failing report") {
  write_config("t_cli/neg.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "init.kind = gaussian\n"
               "init.mean = 1\n"
               "init.var = 2\n"
               "grid.n = 1024\n"
               "horizon = 0.5\n"
               "dt_pde = 5e-4\n"
               "dt_sde = 1e-3\n"
               "m_paths = 20000\n"
               "save_stride_pde = 5\n"
               "save_stride_sde = 5\n");
  int rc = run_cmd(
      "verify --which martingale --negative-control --config t_cli/neg.cfg --out t_cli/neg_out",
      "t_cli/neg.log");
  CHECK(rc == 1);
}

TEST_CASE("same config and seed produce byte-identical outputs") {
  write_config("t_cli/det.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "init.kind = gaussian\n"
               "grid.n = 512\n"
               "horizon = 0.1\n"
               "dt_pde = 1e-3\n"
               "dt_sde = 1e-3\n"
               "m_paths = 2000\n"
               "seed = 9\n"
               "save_stride_pde = 10\n"
               "save_stride_sde = 20\n");
  REQUIRE(run_cmd("simulate --config t_cli/det.cfg --out t_cli/det1", "t_cli/det1.log") == 0);
  REQUIRE(run_cmd("simulate --config t_cli/det.cfg --out t_cli/det2", "t_cli/det2.log") == 0);
  CHECK(slurp("t_cli/det1/ensemble.csv") == slurp("t_cli/det2/ensemble.csv"));
  CHECK(!slurp("t_cli/det1/ensemble.csv").empty());
  CHECK(slurp("t_cli/det1/marginal_comparison.csv") ==
        slurp("t_cli/det2/marginal_comparison.csv"));

  CHECK(slurp("t_cli/det1/ensemble.csv").find("seed=9") != std::string::npos);

  // OTTO_THREADS must not change the numbers
  std::string cmd = "OTTO_THREADS=1 " + g_otto_binary +
                    " simulate --config t_cli/det.cfg --out t_cli/det3 > t_cli/det3.log 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(slurp("t_cli/det1/ensemble.csv") == slurp("t_cli/det3/ensemble.csv"));

  // the emitted config round-trips: re-running from it reproduces the outputs
  REQUIRE(std::filesystem::exists("t_cli/det1/config_used.cfg"));
  REQUIRE(run_cmd("simulate --config t_cli/det1/config_used.cfg --out t_cli/det4",
                  "t_cli/det4.log") == 0);
  CHECK(slurp("t_cli/det1/ensemble.csv") == slurp("t_cli/det4/ensemble.csv"));
}

TEST_CASE("reversed simulate mode emits a reversal report") {
  write_config("t_cli/rev.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "init.kind = gaussian\n"
               "grid.n = 2048\n"
               "horizon = 0.5\n"
               "dt_pde = 5e-4\n"
               "dt_sde = 1e-3\n"
               "m_paths = 50000\n"
               "save_stride_pde = 1\n"
               "save_stride_sde = 25\n");
  int rc = run_cmd("simulate --reversed --config t_cli/rev.cfg --out t_cli/rev_out",
                   "t_cli/rev.log");
  CHECK(rc == 0);
  CHECK(std::filesystem::exists("t_cli/rev_out/reversal_report.csv"));
}

TEST_CASE("martingale verification works with a configured perturbation") {
  write_config("t_cli/pmart.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "init.kind = gaussian\n"
               "grid.n = 1024\n"
               "horizon = 0.4\n"
               "dt_pde = 2e-4\n"
               "dt_sde = 1e-3\n"
               "m_paths = 20000\n"
               "perturbation.amplitude = 0.2\n"
               "perturbation.radius = 1\n"
               "save_stride_pde = 5\n"
               "save_stride_sde = 5\n");
  int rc = run_cmd("verify --which martingale --config t_cli/pmart.cfg --out t_cli/pmart_out",
                   "t_cli/pmart.log");
  CHECK(rc != 2);
  std::string report = slurp("t_cli/pmart_out/verification_report.csv");
  CHECK(report.find("perturbed_martingale_zero_drift") != std::string::npos);
  CHECK(report.find("fisher_expectation") != std::string::npos);
}

TEST_CASE("every verification is reachable by name") {
  write_config("t_cli/reach.cfg",
               "potential.kind = quadratic\n"
               "potential.theta = 0.25\n"
               "init.kind = gaussian\n"
               "grid.n = 512\n"
               "horizon = 0.2\n"
               "dt_pde = 5e-4\n"
               "dt_sde = 1e-3\n"
               "m_paths = 2000\n"
               "save_stride_pde = 5\n"
               "save_stride_sde = 10\n");
  for (const char* name :
       {"de_bruijn", "wasserstein_slope", "steepest_descent", "hwi", "talagrand_lsi", "exp_decay",
        "time_reversal", "martingale", "fontbona_jourdain", "forward_identity",
        "trajectorial_rate"}) {
    int rc = run_cmd(std::string("verify --which ") + name +
                         " --config t_cli/reach.cfg --out t_cli/reach_out",
                     "t_cli/reach.log");
    // statistical tolerances may fail at this tiny scale; reachability means no usage error
    CHECK(rc != 2);
  }
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[argc - 1][0] != '-') g_otto_binary = argv[argc - 1];
  if (g_otto_binary.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-otto-binary>\n");
    return 1;
  }
  doctest::Context ctx;
  return ctx.run();
}
