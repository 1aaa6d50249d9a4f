#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "mgcp_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(MGCP_BIN) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p;
}

// Splits simple csv (no quoted fields) into rows of fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream fl(line);
    std::string field;
    while (std::getline(fl, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("help exits zero and lists the commands") {
  const auto r = run_cli("--help");
  CHECK(r.code == 0);
  for (const char* cmd : {"pmf", "pgf", "lst", "survival", "hazard",
                          "subdensity", "cause", "simulate", "verify"})
    CHECK(r.out.find(cmd) != std::string::npos);
}

TEST_CASE("running without a subcommand exits 2") {
  CHECK(run_cli("").code == 2);
}

TEST_CASE("survival output is byte-stable and matches the closed form") {
  const fs::path a = work_dir() / "surv_a.csv";
  const fs::path b = work_dir() / "surv_b.csv";
  const auto ra = run_cli("survival --grid 0:2:0.5 --out " + a.string());
  const auto rb = run_cli("survival --grid 0:2:0.5 --out " + b.string());
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.out.empty());
  CHECK(ra.err.find("wrote") != std::string::npos);

  const std::string text = slurp(a);
  CHECK(text == slurp(b));

  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"t", "survival"});
  CHECK(rows[1][0] == "0");
  CHECK(rows[1][1] == "1");
  // Default model with the default geometric threshold at t = 1.
  CHECK_THAT(std::stod(rows[3][1]),
             Catch::Matchers::WithinAbs(16.0 / 49.0, 1e-12));
}

TEST_CASE("hypergeometric threshold survival through the cli") {
  const fs::path cfg = write_config(
      "hyper.json",
      R"({"threshold": {"variant": "hypergeometric", "N": 2, "K": 1, "n": 1}})");
  const auto r =
      run_cli("survival --grid 0:2:1 --config " + cfg.string());
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  // Threshold is always 1, so survival is the zero-state mass (1/5)^t.
  CHECK_THAT(std::stod(rows[2][1]), Catch::Matchers::WithinAbs(0.2, 1e-10));
  CHECK_THAT(std::stod(rows[3][1]), Catch::Matchers::WithinAbs(0.04, 1e-10));
}

TEST_CASE("pmf table covers the mass and bounds the residual") {
  const auto r = run_cli("pmf --t 1 --max-total 24");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0] ==
        std::vector<std::string>{"n_1", "n_2", "probability", "tail_bound"});
  CHECK_THAT(std::stod(rows[1][2]), Catch::Matchers::WithinAbs(0.2, 1e-12));

  double mass = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) mass += std::stod(rows[i][2]);
  const auto& last = rows.back();
  CHECK(last[0].empty());
  CHECK(last[2].empty());
  const double residual = std::stod(last[3]);
  CHECK(mass + residual >= 1.0 - 1e-9);
  CHECK(residual < 0.01);
}

TEST_CASE("invalid config value exits 2 and names the field") {
  const fs::path cfg = write_config(
      "bad_theta.json",
      R"({"model": {"q": 2, "lambda": 1.0, "theta": 1.5, "a": [1.0, 1.0],
          "rates": [[0.5], [0.5, 0.5]]}})");
  const auto r = run_cli("pmf --config " + cfg.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("theta") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("malformed grid spec exits 2") {
  const auto r = run_cli("survival --grid 0:5");
  CHECK(r.code == 2);
  CHECK(r.err.find("grid") != std::string::npos);
}

TEST_CASE("series non-convergence exits 3") {
  const fs::path cfg = write_config("tiny.json", R"({"series": {"max_terms": 3}})");
  const auto r = run_cli("pmf --max-total 3 --config " + cfg.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("convergence") != std::string::npos);
}

TEST_CASE("hazard evaluates the single-component closed form") {
  const fs::path cfg = write_config(
      "q1k1.json",
      R"({"model": {"q": 1, "lambda": 1.3, "theta": 0.35, "a": [2.0],
          "rates": [[0.7]]}})");
  const auto r =
      run_cli("hazard --state 3 --r 1 --l 1 --t 0.8 --config " + cfg.string());
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  // lambda mu / ((a + mu)(1 - theta a / (a + mu))) = 0.455 exactly.
  CHECK_THAT(std::stod(rows[1][4]),
             Catch::Matchers::WithinAbs(0.455, 1e-10));

  CHECK(run_cli("hazard --state 3 --r 2 --l 1 --config " + cfg.string()).code ==
        2);
}

TEST_CASE("subdensity reproduces the frozen per-cause values") {
  const auto r1 = run_cli("subdensity --r 1 --t 1");
  REQUIRE(r1.code == 0);
  const auto rows1 = parse_csv(r1.out);
  REQUIRE(rows1.size() == 2);
  CHECK_THAT(std::stod(rows1[1][2]),
             Catch::Matchers::WithinAbs(16.0 / 245.0, 1e-9));

  const auto r2 = run_cli("subdensity --r 2 --t 0.5,1");
  REQUIRE(r2.code == 0);
  const auto rows2 = parse_csv(r2.out);
  REQUIRE(rows2.size() == 3);
  CHECK_THAT(std::stod(rows2[2][2]),
             Catch::Matchers::WithinAbs(327.0 / 2450.0, 1e-9));
}

TEST_CASE("json format mirrors the table structure") {
  const auto r = run_cli("pgf --u 0.3,0.7 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["columns"].size() == 4);
  CHECK(j["columns"][3] == "value");
  REQUIRE(j["rows"].size() == 1);
  CHECK_THAT(j["rows"][0][3].get<double>(),
             Catch::Matchers::WithinAbs(2000.0 / 5587.0, 1e-12));
}

TEST_CASE("simulate survival at time zero is exactly one") {
  const auto r = run_cli("simulate --target survival --t 0 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0][1].get<double>() == 1.0);
  CHECK(j["rows"][0][2].get<double>() == 0.0);
}

TEST_CASE("verify pde suite passes and is byte-stable") {
  const auto a = run_cli("verify --suite pde --format json");
  const auto b = run_cli("verify --suite pde --format json");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"fail\"") == std::string::npos);
  CHECK(a.err.find("[pass]") != std::string::npos);
}

TEST_CASE("verify mc suite is deterministic for a fixed seed") {
  const fs::path cfg = write_config(
      "mc_small.json",
      R"({"mc": {"samples": 20000, "seed": 5, "workers": 1}})");
  const auto a = run_cli("verify --suite mc --config " + cfg.string());
  const auto b = run_cli("verify --suite mc --config " + cfg.string());
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  // A different seed through the flag changes the estimates.
  const auto c =
      run_cli("verify --suite mc --seed 9 --config " + cfg.string());
  REQUIRE(c.code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("verify shock suite reports the crediting gap and exits 1") {
  const auto r = run_cli("verify --suite shock");
  CHECK(r.code == 1);
  CHECK(r.out.find("credited failure rate vs survival slope") !=
        std::string::npos);
  CHECK(r.err.find("[FAIL]") != std::string::npos);
  CHECK(r.out.find("hazard flat across states") != std::string::npos);
}

TEST_CASE("plot script needs a csv output target") {
  const fs::path script = work_dir() / "plot.gp";
  CHECK(run_cli("survival --plot-script " + script.string()).code == 2);

  const fs::path out = work_dir() / "for_plot.csv";
  const auto ok = run_cli("survival --grid 0:1:0.5 --out " + out.string() +
                          " --plot-script " + script.string());
  CHECK(ok.code == 0);
  const std::string text = slurp(script);
  CHECK(text.find("plot") != std::string::npos);
  CHECK(text.find(out.string()) != std::string::npos);
}
