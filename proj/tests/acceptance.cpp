// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/commands.hpp"
#include "core/config.hpp"
#include "core/continuants.hpp"
#include "core/nonconc.hpp"
#include "core/thermo.hpp"
#include "oracles.hpp"

using namespace gfd;
namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_root;

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [violated]");
  }
};

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_body(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

struct Ran {
  CommandOutcome outcome;
  json summary;
  std::vector<std::vector<std::string>> rows;
};

Ran run(const std::string& command, const std::string& tag,
        const std::vector<std::pair<std::string, std::string>>& settings) {
  RunConfig cfg;
  cfg.command = command;
  for (const auto& [k, v] : settings) cfg.set(k, v);
  cfg.out = (g_root / tag).string();
  Ran r;
  r.outcome = run_command(cfg);
  if (r.outcome.exit_code == 0) {
    r.summary = json::parse(slurp(r.outcome.json_path));
    r.rows = csv_body(r.outcome.csv_path);
  }
  return r;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Verdict c1_identities(const Ran& r) {
  Verdict v;
  v.require(r.outcome.exit_code == 0, "exit " + std::to_string(r.outcome.exit_code));
  if (r.outcome.exit_code != 0) return v;
  for (const char* s : {"determinant", "mirror", "length", "quasi"}) {
    const auto& suite = r.summary["suites"][s];
    std::uint64_t checked = suite["checked"], failures = suite["failures"];
    v.require(checked >= 10000 && failures == 0,
              std::string(s) + " " + std::to_string(failures) + "/" + std::to_string(checked));
  }
  double t = r.summary["runtime_s"];
  v.require(t < 10, "runtime " + fmt(t, 3) + " s (all suites)");
  return v;
}

Verdict c2_distdioph(const Ran& r) {
  Verdict v;
  v.require(r.outcome.exit_code == 0, "exit " + std::to_string(r.outcome.exit_code));
  if (r.outcome.exit_code != 0) return v;
  const auto& suite = r.summary["suites"]["distdioph"];
  std::uint64_t checked = suite["checked"], failures = suite["failures"];
  v.require(checked >= 10000 * 17 && failures == 0,
            std::to_string(failures) + " failures over " + std::to_string(checked) + " (pair, x) checks");
  return v;
}

Verdict c3_transfer() {
  Verdict v;
  for (Digit hi : {2u, 10u, 1000u}) {
    Rational one = lueroth_transfer_one_exact({1, hi}, true);
    v.require(one == 1, "Lueroth L1 over 1.." + std::to_string(hi) + " = " + one.str());
  }
  GibbsSpec g = make_spec(MarkovSystem::gauss(10000), {1, 10000}, 1.0, 4, 0.2, 1ull << 24);
  g.pressure_shift = 0.0;
  auto h = [](double x) { return 1.0 / ((1 + x) * std::log(2.0)); };
  double worst = 0;
  for (int i = 0; i <= 64; ++i) {
    double x = i / 64.0;
    worst = std::max(worst, std::abs(transfer_apply(g, h, x, 1) - h(x)));
  }
  v.require(worst < 1e-3, "Gauss-Kuzmin sup residual " + fmt(worst, 3) + " at cutoff 1e4");
  return v;
}

Verdict c4_lyapunov() {
  Verdict v;
  double quad = oracle::simpson(
      [](double t) { return 2 * t * std::exp(-t) / ((1 + std::exp(-t)) * std::log(2.0)); }, 0, 60, 200000);
  double est = lyapunov_estimate(gauss_kuzmin_measure(1000, 2));
  v.require(std::abs(est - quad) < 0.02, "Gauss " + fmt(est) + " vs quadrature " + fmt(quad));
  GibbsSpec one = make_spec(MarkovSystem::gauss(1), {1, 1}, 0.5, 40, 0.2, 1ull << 20);
  double inc = lyapunov_increment(gibbs_measure(one, 40), gibbs_measure(one, 39));
  double golden = 2 * std::log((1 + std::sqrt(5.0)) / 2);
  v.require(std::abs(inc - golden) < 1e-6, "alphabet {1} " + fmt(inc, 12) + " vs " + fmt(golden, 12));
  return v;
}

Verdict c5_root() {
  Verdict v;
  auto t0 = Clock::now();
  DimensionRoot r = pressure_root(MarkovSystem::gauss(2), {1, 2}, 12);
  double t = seconds_since(t0);
  double lo = std::min(r.lower_root, r.upper_root), hi = std::max(r.lower_root, r.upper_root);
  v.require(lo <= r.increment_root && r.increment_root <= hi,
            "proxy roots [" + fmt(lo) + ", " + fmt(hi) + "] contain increment root " + fmt(r.increment_root));
  v.require(r.increment_root >= 0.525 && r.increment_root <= 0.540, "root in [0.525, 0.540]");
  v.require(t < 60, "runtime " + fmt(t, 3) + " s");
  return v;
}

Verdict c6_largedev(const Ran& r) {
  Verdict v;
  v.require(r.outcome.exit_code == 0, "Gauss scan exit " + std::to_string(r.outcome.exit_code));
  if (r.outcome.exit_code == 0) {
    bool positive = true, monotone = true;
    double prev = INFINITY;
    std::string trace;
    for (const auto& row : r.rows) {
      int n = std::stoi(row[0]);
      double m = std::stod(row[1]);
      trace += (trace.empty() ? "" : " ") + fmt(m, 3);
      positive = positive && m > 0;
      if (n >= 8) {
        monotone = monotone && m <= prev;
        prev = m;
      }
    }
    v.require(positive && monotone, "Gauss complement n=6..14: " + trace);
  }
  GibbsSpec lb = make_bernoulli_spec(MarkovSystem::lueroth(2), {1, 2}, {1, 1}, 8, 0.2, 1ull << 24);
  std::vector<int> ns = {6, 7, 8, 9, 10, 11, 12, 13, 14};
  LargeDevResult res = large_deviation_scan(lb, 0.2, ns);
  const double lam = 0.5 * (std::log(2.0) + std::log(6.0)), sh = std::log(2.0) / lam;
  double worst = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    int n = ns[i];
    double tail = 0;
    for (int j = 0; j <= n; ++j) {
      double spsi = j * std::log(2.0) + (n - j) * std::log(6.0);
      bool inside = std::abs(spsi / n - lam) < 0.2 && std::abs(n * std::log(2.0) / spsi - sh) < 0.2;
      if (!inside) tail += oracle::binom(n, j) * std::pow(0.5, n);
    }
    worst = std::max(worst, std::abs(res.rows[i].complement_mass - tail));
  }
  v.require(worst <= 1e-12, "Lueroth binomial-tail deviation " + fmt(worst, 3));
  return v;
}

Verdict c7_nonconc(const Ran& lue, const Ran& gauss, double t_lue, double t_gauss) {
  Verdict v;
  v.require(lue.outcome.exit_code == 0 && gauss.outcome.exit_code == 0, "exit codes");
  if (!v.pass) return v;
  double kl = lue.summary["fitted_exponents"]["kappa_hat"], kg = gauss.summary["fitted_exponents"]["kappa_hat"];
  v.require(kl == 0.0, "Lueroth kappa_hat " + fmt(kl));
  v.require(kg >= 0.2, "Gauss kappa_hat " + fmt(kg));
  v.require(t_lue < 120 && t_gauss < 120, "runtimes " + fmt(t_lue, 3) + " s, " + fmt(t_gauss, 3) + " s");
  return v;
}

Verdict c8_regular() {
  Verdict v;
  GibbsSpec spec = make_spec(MarkovSystem::gauss(2), {1, 2}, collocation_root(MarkovSystem::gauss(2), {1, 2}), 8, 0.2,
                             1ull << 24);
  FrozenConstants c = estimate_constants(spec, 16);
  CylinderMeasure mu = gibbs_measure(spec);
  RegularTree t = regular_words(spec, c.lambda_hat, c.s_hat, mu);
  RegularBoundsReport r = check_regular_bounds(t, mu);
  v.require(t.size() > 0, std::to_string(t.size()) + " kept words, " + std::to_string(r.checked) + " (word, scale) checks");
  v.require(r.derivative_fail == 0, "derivative bound failures " + std::to_string(r.derivative_fail));
  v.require(r.length_fail == 0, "length bound failures " + std::to_string(r.length_fail));
  v.require(r.measure_fail == 0, "measure bound failures " + std::to_string(r.measure_fail));
  std::uint64_t zeta_bad = 0;
  for (std::size_t p = 0; p < t.size(); ++p)
    for (std::size_t q = 0; q < t.size(); ++q) zeta_bad += !zeta_range_ok(t, zeta_values(t, p, q));
  v.require(zeta_bad == 0, "zeta range failures " + std::to_string(zeta_bad));
  v.require(r.cardinality_ok, "cardinality in [" + fmt(r.card_lower) + ", " + fmt(r.card_upper) + "]");
  return v;
}

Verdict c9_decay(const Ran& gauss, const Ran& cantor) {
  Verdict v;
  v.require(gauss.outcome.exit_code == 0 && cantor.outcome.exit_code == 0, "exit codes");
  if (!v.pass) return v;
  const auto& g = gauss.summary["fitted_exponents"];
  const auto& c = cantor.summary["fitted_exponents"];
  double ge = g["e_hat"], glo = g["ci_lo"], ghi = g["ci_hi"];
  double ce = c["e_hat"], clo = c["ci_lo"], chi = c["ci_hi"];
  v.require(ge > 0 && glo > 0, "Gauss n=16 e_hat " + fmt(ge, 4) + " CI [" + fmt(glo, 4) + ", " + fmt(ghi, 4) + "]");
  v.require(clo <= 0 && 0 <= chi, "ternary e_hat " + fmt(ce, 4) + " CI [" + fmt(clo, 4) + ", " + fmt(chi, 4) + "]");
  return v;
}

Verdict c10_expsum(const Ran& r) {
  Verdict v;
  v.require(r.outcome.exit_code == 0, "exit " + std::to_string(r.outcome.exit_code));
  if (r.outcome.exit_code != 0) return v;
  double lo = r.summary["window"][0], hi = r.summary["window"][1];
  double bottom = 0, top = 0;
  for (const auto& row : r.rows) {
    double eta = std::stod(row[0]), m = std::stod(row[1]);
    if (eta <= 10 * lo) bottom = std::max(bottom, m);
    if (eta >= hi / 10) top = std::max(top, m);
  }
  v.require(bottom > 0 && top <= 0.9 * bottom,
            "top-decade max " + fmt(top, 4) + " vs bottom-decade max " + fmt(bottom, 4) + ", |W| blocks " +
                std::to_string(r.summary["kept_blocks"].get<std::uint64_t>()));
  return v;
}

Verdict c11_equidist(const Ran& id, const Ran& pell, const Ran& rational) {
  Verdict v;
  v.require(id.outcome.exit_code == 0 && pell.outcome.exit_code == 0 && rational.outcome.exit_code == 0, "exit codes");
  if (!v.pass) return v;
  auto worst_at = [](const Ran& r, const std::string& N) {
    double w = 0;
    for (const auto& row : r.rows)
      if (row[2] == N) w = std::max(w, std::stod(row[5]));
    return w;
  };
  double wi = worst_at(id, "10000"), wp = worst_at(pell, "10000");
  v.require(wi <= 0.1, "n_k = k: max |W| " + fmt(wi, 3));
  v.require(wp <= 0.1, "Pell: max |W| " + fmt(wp, 3));
  bool all_one = !rational.rows.empty();
  for (const auto& row : rational.rows) all_one = all_one && std::abs(std::stod(row[5]) - 1) < 1e-12;
  v.require(all_one, "rational control |W| = 1 on " + std::to_string(rational.rows.size()) + " rows");
  return v;
}

int shell(const std::string& args) {
  std::string cmd = std::string(GF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Verdict c12_determinism() {
  Verdict v;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"decay", "decay --n 12 --seed 7"},
      {"expsum", "expsum --n 8 --k 2 --blocks 32 --seed 7"},
      {"equidist", "equidist --seq pell --points 2 --N 100,1000 --seed 7"},
      {"nonconc", "nonconc --n 8 --seed 7"},
  };
  for (const auto& [name, args] : runs) {
    fs::path a = g_root / ("det_a_" + name), b = g_root / ("det_b_" + name);
    int ra = shell(args + " --out " + a.string()), rb = shell(args + " --out " + b.string());
    std::string ca = slurp(a / (name + ".csv")), cb = slurp(b / (name + ".csv"));
    v.require(ra == 0 && rb == 0 && !ca.empty() && ca == cb, name + " " + std::to_string(ca.size()) + " bytes");
  }
  return v;
}

}  // namespace

int main() {
  g_root = fs::temp_directory_path() / ("gfdecay_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(g_root);
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Verdict()>& f) {
    auto t0 = Clock::now();
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::printf("%s %2d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
  };

  Ran ident;
  report(1, "identity suite", [&] {
    ident = run("identities", "identities", {{"words", "10000"}, {"max_length", "30"}, {"pairs", "10000"}});
    return c1_identities(ident);
  });
  report(2, "DistDioph sandwich", [&] { return c2_distdioph(ident); });
  report(3, "transfer operator", c3_transfer);
  report(4, "Lyapunov exponents", c4_lyapunov);
  report(5, "dimension root bracket", c5_root);
  report(6, "large deviations", [&] {
    return c6_largedev(run("largedev", "largedev", {{"alphabet", "1..2"}, {"epsilon", "0.2"}, {"n_list", "6,7,8,9,10,11,12,13,14"}}));
  });
  report(7, "nonlinearity dichotomy", [&] {
    auto t0 = Clock::now();
    Ran l = run("nonconc", "nonconc_lueroth", {{"map", "lueroth"}, {"alphabet", "1..2"}, {"n", "8"}});
    double tl = seconds_since(t0);
    t0 = Clock::now();
    Ran g = run("nonconc", "nonconc_gauss", {{"map", "gauss"}, {"alphabet", "1..2"}, {"n", "8"}});
    return c7_nonconc(l, g, tl, seconds_since(t0));
  });
  report(8, "regular-word corridors", c8_regular);
  report(9, "Fourier decay trend", [&] {
    Ran g = run("decay", "decay_gauss", {{"map", "gauss"}, {"alphabet", "1..2"}, {"n", "16"}});
    Ran c = run("decay", "decay_cantor", {{"map", "cantor"}, {"n", "12"}});
    return c9_decay(g, c);
  });
  report(10, "exponential-sum decay", [&] {
    return c10_expsum(run("expsum", "expsum", {{"alphabet", "1..2"}, {"n", "8"}, {"k", "2"}, {"eta_points", "16"}}));
  });
  report(11, "equidistribution", [&] {
    std::vector<std::pair<std::string, std::string>> common = {
        {"alphabet", "1..2"}, {"m_max", "5"}, {"N", "100,1000,10000"}, {"points", "3"}};
    auto with = [&](std::vector<std::pair<std::string, std::string>> extra) {
      extra.insert(extra.begin(), common.begin(), common.end());
      return extra;
    };
    Ran id = run("equidist", "equidist_identity", with({{"seq", "identity"}}));
    Ran pell = run("equidist", "equidist_pell", with({{"seq", "pell"}}));
    Ran rat = run("equidist", "equidist_rational", with({{"seq", "identity"}, {"x", "0"}}));
    return c11_equidist(id, pell, rat);
  });
  report(12, "determinism", c12_determinism);

  std::error_code ec;
  fs::remove_all(g_root, ec);
  std::printf("%d of 12 criteria failed\n", failed);
  return failed ? 1 : 0;
}
