#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gfdecay/gfdecay.h"

namespace {

struct Flag {
  const char* key;
  const char* help;
};

// Flags shared by every subcommand, then per-command extras.
const Flag kCommon[] = {
    {"map", "gauss | lueroth | cantor"},
    {"alphabet", "digit range lo..hi"},
    {"s", "potential exponent (default: dimension root)"},
    {"n", "word depth"},
    {"epsilon", "corridor width"},
    {"k", "block arity"},
    {"seed", "RNG seed"},
    {"budget", "max enumerated cylinders"},
    {"out", "output directory"},
};

const std::map<std::string, std::vector<Flag>> kExtra = {
    {"identities", {{"words", "random words"}, {"max_length", "max word length"}, {"pairs", "DistDioph pairs"}}},
    {"decay", {{"j_lo", "first dyadic block"}, {"j_hi", "last dyadic block"}, {"samples", "min samples per block"},
               {"weights", "bernoulli weights w1,w2,..."}}},
    {"nonconc", {}},
    {"expsum", {{"eta_points", "eta grid size"}, {"blocks", "sampled blocks"}, {"eps3", "sigma window exponent"},
                {"s0", "well-distribution exponent"}}},
    {"equidist", {{"x", "fixed x (p/q or decimal)"}, {"seq", "identity | pell | fibonacci | digits:a,b | file:path"},
                  {"m_max", "largest frequency"}, {"N", "N grid, comma separated"}, {"points", "sampled points"}}},
    {"largedev", {{"n_list", "depths, comma separated"}, {"weights", "bernoulli weights w1,w2,..."}}},
};

const char* kHelp[][2] = {
    {"identities", "continuant, mirror, determinant, length, quasi and DistDioph suites"},
    {"decay", "Fourier decay scan of a Gibbs measure"},
    {"nonconc", "nonlinearity counts over regular words"},
    {"expsum", "exponential sums over well-distributed blocks"},
    {"equidist", "Weyl sums along an increasing sequence"},
    {"largedev", "large-deviation complement masses"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier decay and continued-fraction toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  bool inject_fault = false;
  std::map<std::string, std::map<std::string, std::string>> values;

  for (const auto& h : kHelp) {
    std::string name = h[0];
    CLI::App* sub = app.add_subcommand(name, h[1]);
    auto& vals = values[name];
    auto add = [&](const Flag& f) { sub->add_option(std::string("--") + f.key, vals[f.key], f.help); };
    for (const auto& f : kCommon) add(f);
    for (const auto& f : kExtra.at(name)) add(f);
    sub->add_option("--config", config_path, "JSON config; flags override it");
    if (name == "identities") sub->add_flag("--inject-fault", inject_fault)->group("");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  gf_config* cfg = nullptr;
  auto check = [&](gf_status st) {
    if (st == GF_OK) return true;
    std::fprintf(stderr, "error (%s): %s\n", gf_status_name(st), gf_last_error());
    return false;
  };
  if (!check(gf_config_create(command.c_str(), &cfg))) return 1;
  int rc = 1;
  bool ok = true;
  if (!config_path.empty()) ok = check(gf_config_load_json(cfg, config_path.c_str()));
  for (const auto& [key, value] : values[command]) {
    if (!ok) break;
    if (sub->count(std::string("--") + key) == 0) continue;
    ok = check(gf_config_set(cfg, key.c_str(), value.c_str()));
  }
  if (ok && inject_fault) ok = check(gf_config_set(cfg, "inject_fault", "true"));
  if (ok) {
    gf_status st = gf_run(cfg, &rc);
    if (st != GF_OK) {
      check(st);
    } else if (rc != 0) {
      std::fprintf(stderr, "%s: %s\n", command.c_str(), gf_last_error());
    }
  } else {
    rc = 1;
  }
  gf_config_destroy(cfg);
  return rc;
}
