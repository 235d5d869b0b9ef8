#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path root;
  explicit Workdir(const std::string& name) : root(fs::temp_directory_path() / ("freezing_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }

  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(root / file) << text;
    return root / file;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(FREEZING_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kChain = R"({"generator":{"complete_graph_theta":[0.5,0.5]},
  "schedule":{"kind":"power_law","a":1.0,"theta":0.5},"N":100,"M":1,"seed":5})";

}  // namespace

TEST_CASE("simulate-chain: smoke, determinism, manifest replay, config error") {
  Workdir w("chain");
  const auto cfg = w.write("c.json", kChain);
  REQUIRE(run("simulate-chain --config " + cfg.string() + " --out " + (w.root / "a").string()) == 0);
  REQUIRE(run("simulate-chain --config " + cfg.string() + " --out " + (w.root / "b").string() + " --threads 2") == 0);
  const auto csv = slurp(w.root / "a" / "chain.csv");
  CHECK(csv.rfind("replicate,n,i,x_1,x_2,y_1,y_2\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("\n0,100,") != std::string::npos);
  CHECK(csv == slurp(w.root / "b" / "chain.csv"));

  const auto manifest = nlohmann::json::parse(slurp(w.root / "a" / "manifest.json"));
  CHECK(manifest["command"] == "simulate-chain");
  CHECK(manifest["config"]["seed"] == 5);
  CHECK(manifest["config_hash"].get<std::string>().size() == 40);
  REQUIRE(run("simulate-chain --config " + (w.root / "a" / "manifest.json").string() + " --out " +
              (w.root / "c").string()) == 0);
  CHECK(csv == slurp(w.root / "c" / "chain.csv"));

  REQUIRE(run("simulate-chain --config " + cfg.string() + " --seed 6 --out " + (w.root / "d").string()) == 0);
  CHECK(csv != slurp(w.root / "d" / "chain.csv"));

  const auto bad = w.write("bad.json", R"({"generator":{"complete_graph_theta":[0.5,0.5]},
    "schedule":{"kind":"power_law","a":-1.0,"theta":0.5},"N":100,"M":1})");
  CHECK(run("simulate-chain --config " + bad.string() + " --out " + (w.root / "e").string()) == 2);
  CHECK(run("simulate-chain --config " + (w.root / "missing.json").string()) == 2);
}

TEST_CASE("simulate-ezz and simulate-ou: smoke, determinism, config error") {
  Workdir w("proc");
  const auto ezz = w.write("e.json", R"({"generator":{"complete_graph_theta":[0.125,0.25,0.625]},
    "a":2.0,"T":1.0,"M":3,"init":"nu","seed":1})");
  REQUIRE(run("simulate-ezz --config " + ezz.string() + " --out " + (w.root / "a").string()) == 0);
  REQUIRE(run("simulate-ezz --config " + ezz.string() + " --out " + (w.root / "b").string()) == 0);
  const auto e = slurp(w.root / "a" / "ezz.csv");
  CHECK(e.rfind("replicate,t_event,i_after,x_1,x_2,x_3\n", 0) == 0);
  CHECK(e == slurp(w.root / "b" / "ezz.csv"));
  const auto ezz_bad = w.write("eb.json", R"({"generator":{"complete_graph_theta":[0.5,0.5]},"a":-2})");
  CHECK(run("simulate-ezz --config " + ezz_bad.string() + " --out " + (w.root / "c").string()) == 2);

  const auto ou = w.write("o.json", R"({"generator":{"complete_graph_theta":[0.5,0.5]},"mode":"path",
    "dt":0.1,"steps":5,"M":2,"seed":4})");
  REQUIRE(run("simulate-ou --config " + ou.string() + " --out " + (w.root / "d").string()) == 0);
  REQUIRE(run("simulate-ou --config " + ou.string() + " --out " + (w.root / "e").string()) == 0);
  const auto o = slurp(w.root / "d" / "ou.csv");
  CHECK(o.rfind("replicate,step,t,y_1,y_2\n", 0) == 0);
  CHECK(o == slurp(w.root / "e" / "ou.csv"));
  const auto ou_bad = w.write("ob.json", R"({"sigma":[[1,0],[0,-1]]})");
  CHECK(run("simulate-ou --config " + ou_bad.string() + " --out " + (w.root / "f").string()) == 3);
  const auto ou_bad2 = w.write("ob2.json", R"({"sigma":[[1,0],[0,1]],"mode":"sideways"})");
  CHECK(run("simulate-ou --config " + ou_bad2.string() + " --out " + (w.root / "g").string()) == 2);
}

TEST_CASE("limits: nu, symmetric Sigma with zero row sums, density table") {
  Workdir w("limits");
  const auto cfg = w.write("l.json", R"({"generator":{"complete_graph_theta":[0.125,0.25,0.625]},
    "a":8,"p":0,"upsilon":1,"density_grid":12})");
  REQUIRE(run("limits --config " + cfg.string() + " --out " + w.root.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(w.root / "limits.json"));
  CHECK(j["nu"][0].get<double>() == doctest::Approx(0.125));
  CHECK(j["nu"][1].get<double>() == doctest::Approx(0.25));
  CHECK(j["nu"][2].get<double>() == doctest::Approx(0.625));
  const auto& s = j["sigma"];
  for (int k = 0; k < 3; ++k) {
    double row = 0.0;
    for (int l = 0; l < 3; ++l) {
      row += s[k][l].get<double>();
      CHECK(s[k][l].get<double>() == doctest::Approx(s[l][k].get<double>()));
    }
    CHECK(std::abs(row) < 1e-12);
  }
  CHECK(j["mixture"]["dirichlet_parameters"][0] == nlohmann::json::parse("[2.0,2.0,5.0]"));
  CHECK(slurp(w.root / "density.csv").rfind("x_1,x_2,x_3,phi_1,phi_2,phi_3,marginal\n", 0) == 0);
}

TEST_CASE("rate-fit and verify dispatch") {
  Workdir w("misc");
  const auto rf = w.write("r.json", R"({"x":[10,100,1000,10000,100000],
    "d":[0.31622776601683794,0.1,0.0316227766016838,0.01,0.0031622776601683794]})");
  REQUIRE(run("rate-fit --config " + rf.string() + " --out " + w.root.string()) == 0);
  const auto fit = nlohmann::json::parse(slurp(w.root / "rate_fit.json"));
  CHECK(fit["slope"].get<double>() == doctest::Approx(-0.5).epsilon(1e-9));
  const auto rf_bad = w.write("rb.json", R"({"x":[1,2,3,4,5],"d":[1,0,1,1,1]})");
  CHECK(run("rate-fit --config " + rf_bad.string() + " --out " + w.root.string()) == 3);

  CHECK(run("verify transport-pde --out " + (w.root / "v").string()) == 0);
  const auto report = nlohmann::json::parse(slurp(w.root / "v" / "verify_report.json"));
  CHECK(report["criteria"][0]["id"] == "A7");
  CHECK(run("verify no-such-suite --out " + (w.root / "v").string()) == 2);
  CHECK(run("frobnicate") == 2);
}
