#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("gfdecay_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  std::string cmd = std::string(GF_CLI_PATH) + " " + args + " >" + (scratch() / "stdout.txt").string() + " 2>" +
                    (scratch() / "stderr.txt").string();
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

nlohmann::json summary(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("cli identities") {
  fs::path out = scratch() / "ident";
  CHECK(run("identities --words 2000 --pairs 500 --out " + out.string()) == 0);
  auto j = summary(out / "identities.json");
  CHECK(j["total_failures"] == 0);
  CHECK(j["suites"]["determinant"]["checked"] == 2000);
  CHECK(j["suites"]["distdioph"]["checked"] == 500 * 17);
  CHECK(j.contains("runtime_s"));
  CHECK(j.contains("params"));
  CHECK(run("identities --words 200 --pairs 10 --inject-fault --out " + out.string()) == 1);
  CHECK(run("identities --alphabet 3..2 --out " + out.string()) == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("empty alphabet") != std::string::npos);
}

TEST_CASE("cli decay") {
  fs::path out = scratch() / "decay";
  CHECK(run("decay --map gauss --alphabet 1..2 --n 12 --out " + out.string()) == 0);
  auto rows = csv_rows(out / "decay.csv");
  REQUIRE(rows.size() >= 21);
  CHECK(rows[0] == std::vector<std::string>{"j", "xi_lo", "xi_hi", "sup_abs", "n_samples", "aliased"});
  CHECK(summary(out / "decay.json")["fitted_exponents"].contains("e_hat"));
  CHECK(run("decay --n 30 --budget 1000 --out " + out.string()) == 2);
  CHECK(run("decay --n 8 --j_lo 20 --j_hi 21 --out " + out.string()) == 3);
}

TEST_CASE("cli nonconc on the linear control") {
  fs::path out = scratch() / "nonconc";
  CHECK(run("nonconc --map lueroth --alphabet 1..2 --n 8 --out " + out.string()) == 0);
  CHECK(summary(out / "nonconc.json")["fitted_exponents"]["kappa_hat"] == 0.0);
  CHECK(csv_rows(out / "nonconc.csv")[0].front() == "n");
}

TEST_CASE("cli equidist with fixed x") {
  fs::path out = scratch() / "equi";
  CHECK(run("equidist --x 0 --m_max 3 --N 10,100 --out " + out.string()) == 0);
  auto rows = csv_rows(out / "equidist.csv");
  REQUIRE(rows.size() == 7);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][5] == "1");
  fs::path seq = scratch() / "seq.txt";
  std::ofstream(seq) << "1\n4\n9\n16\n";
  CHECK(run("equidist --x 1/2 --seq file:" + seq.string() + " --m_max 1 --N 4 --out " + out.string()) == 0);
  CHECK(run("equidist --x 1/2 --seq file:" + (scratch() / "missing.txt").string() + " --out " + out.string()) == 1);
}

TEST_CASE("cli expsum and largedev") {
  fs::path out = scratch() / "misc";
  CHECK(run("expsum --n 8 --k 2 --blocks 16 --out " + out.string()) == 0);
  CHECK(csv_rows(out / "expsum.csv")[0] == std::vector<std::string>{"eta", "max_abs", "n_blocks_sampled"});
  CHECK(run("expsum --map lueroth --k 1 --s0 0.5 --out " + out.string()) == 1);
  CHECK(run("largedev --n_list 4,5,6 --out " + out.string()) == 0);
  CHECK(csv_rows(out / "largedev.csv").size() == 4);
}

TEST_CASE("cli config file and flag override") {
  fs::path out = scratch() / "cfg";
  fs::path cfg = scratch() / "cfg.json";
  std::ofstream(cfg) << R"({"n": 6, "alphabet": "1..2", "n_list": [4, 5], "out": ")" << out.string() << R"("})";
  CHECK(run("largedev --config " + cfg.string() + " --n_list 4,5,6") == 0);
  CHECK(csv_rows(out / "largedev.csv").size() == 4);
  std::ofstream(cfg) << R"({"bogus": 1})";
  CHECK(run("largedev --config " + cfg.string()) == 1);
}

TEST_CASE("cli output is byte-identical across runs and thread counts") {
  fs::path a = scratch() / "det_a", b = scratch() / "det_b";
  CHECK(run("decay --n 10 --j_hi 12 --seed 3 --out " + a.string()) == 0);
  CHECK(run("decay --n 10 --j_hi 12 --seed 3 --out " + b.string()) == 0);
  CHECK(slurp(a / "decay.csv") == slurp(b / "decay.csv"));
  ::setenv("GF_THREADS", "1", 1);
  CHECK(run("expsum --n 8 --blocks 8 --seed 5 --out " + a.string()) == 0);
  ::setenv("GF_THREADS", "3", 1);
  CHECK(run("expsum --n 8 --blocks 8 --seed 5 --out " + b.string()) == 0);
  ::unsetenv("GF_THREADS");
  CHECK(slurp(a / "expsum.csv") == slurp(b / "expsum.csv"));
}
