#include "core/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "core/continuants.hpp"
#include "core/csv.hpp"
#include "core/equidist.hpp"
#include "core/fourier.hpp"
#include "core/nonconc.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace gfd {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

json params_json(const RunConfig& c) {
  json p;
  p["command"] = c.command;
  p["map"] = c.map;
  p["alphabet"] = {c.alpha_lo, c.alpha_hi};
  p["s"] = c.s ? json(*c.s) : json(nullptr);
  p["n"] = c.n;
  p["epsilon"] = c.epsilon;
  p["k"] = c.k;
  p["seed"] = c.seed;
  p["budget"] = c.budget;
  if (c.command == "identities") {
    p["words"] = c.words;
    p["max_length"] = c.max_length;
    p["pairs"] = c.pairs;
    p["inject_fault"] = c.inject_fault;
  } else if (c.command == "decay") {
    p["j_range"] = {c.j_lo, c.j_hi};
    p["samples_per_block"] = c.samples;
    p["weights"] = c.weights;
  } else if (c.command == "expsum") {
    p["eta_points"] = c.eta_points;
    p["blocks"] = c.blocks;
    p["eps3"] = c.eps3;
    p["s0"] = c.s0 ? json(*c.s0) : json(nullptr);
  } else if (c.command == "equidist") {
    p["x"] = c.x ? json(*c.x) : json(nullptr);
    p["seq"] = c.seq;
    p["m_max"] = c.m_max;
    p["N"] = c.N_grid;
    p["points"] = c.points;
  } else if (c.command == "largedev") {
    p["n_list"] = c.n_list;
    p["weights"] = c.weights;
  }
  return p;
}

std::string out_path(const RunConfig& cfg, const std::string& ext) {
  return (std::filesystem::path(cfg.out) / (cfg.command + ext)).string();
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) fail(Errc::io, "cannot create output directory " + cfg.out + ": " + ec.message());
}

CommandOutcome finish(const RunConfig& cfg, const Csv& csv, json summary, Clock::time_point t0, int exit_code = 0,
                      std::string message = "ok") {
  CommandOutcome o;
  o.exit_code = exit_code;
  o.message = std::move(message);
  o.csv_path = out_path(cfg, ".csv");
  o.json_path = out_path(cfg, ".json");
  summary["params"] = params_json(cfg);
  summary["runtime_s"] = std::chrono::duration<double>(Clock::now() - t0).count();
  summary["exit_code"] = exit_code;
  summary["message"] = o.message;
  write_file(o.csv_path, csv.text());
  write_file(o.json_path, summary.dump(2) + "\n");
  return o;
}

Word random_word(Rng& rng, Alphabet alph, std::size_t len) {
  Word w(len);
  for (auto& d : w) d = alph.lo + static_cast<Digit>(rng.uniform() * alph.size());
  return w;
}

// Independent fold 1/(a_1 + 1/(a_2 + ...)).
Rational nested_fraction(const Word& w) {
  Rational x = 0;
  for (std::size_t i = w.size(); i-- > 0;) x = Rational(1) / (Rational(BigInt(w[i])) + x);
  return x;
}

struct SuiteCount {
  std::uint64_t checked = 0, failures = 0;
  std::string first_failure;
};

}  // namespace

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::resource: return 2;
    case Errc::aliasing: return 3;
    default: return 1;
  }
}

Rational parse_rational(const std::string& text) {
  std::string t = text;
  auto slash = t.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt p(t.substr(0, slash)), q(t.substr(slash + 1));
      if (q == 0) fail(Errc::config, "zero denominator in " + text);
      return Rational(p, q);
    }
    bool neg = !t.empty() && t[0] == '-';
    if (neg || (!t.empty() && t[0] == '+')) t = t.substr(1);
    auto dot = t.find('.');
    std::string ip = dot == std::string::npos ? t : t.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : t.substr(dot + 1);
    if ((ip + fp).empty() || (ip + fp).find_first_not_of("0123456789") != std::string::npos)
      fail(Errc::config, "bad rational: " + text);
    BigInt num((ip.empty() ? "0" : ip) + fp);
    BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fp.size()));
    Rational r(num, den);
    return neg ? Rational(-r) : r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::config, "bad rational: " + text);
  }
}

GibbsSpec spec_from_config(const RunConfig& cfg) {
  MarkovSystem sys = cfg.system();
  Alphabet alph = cfg.alphabet();
  if (sys.kind() == MapKind::cantor || !cfg.weights.empty()) {
    std::vector<double> w = cfg.weights.empty() ? std::vector<double>(alph.size(), 1.0) : cfg.weights;
    return make_bernoulli_spec(sys, alph, w, cfg.n, cfg.epsilon, cfg.budget);
  }
  double s = cfg.s ? *cfg.s : collocation_root(sys, alph);
  return make_spec(sys, alph, s, cfg.n, cfg.epsilon, cfg.budget);
}

int reference_depth(const GibbsSpec& spec) {
  int m = std::max(spec.n + 4, 16);
  const double cap = std::min<double>(static_cast<double>(spec.budget), 1 << 20);
  while (m > 2 && std::pow(static_cast<double>(spec.alphabet.size()), m) > cap) --m;
  return m;
}

CommandOutcome cmd_identities(const RunConfig& cfg) {
  auto t0 = Clock::now();
  const Alphabet alph = cfg.alphabet();
  const MarkovSystem sys = cfg.system();
  struct Flag {
    bool prev;
    explicit Flag(bool on) : prev(testing::corrupt_recurrence()) { testing::set_corrupt_recurrence(on || prev); }
    ~Flag() { testing::set_corrupt_recurrence(prev); }
  } flag(cfg.inject_fault);

  const char* names[] = {"continuant", "determinant", "mirror", "length", "quasi", "distdioph"};
  constexpr std::size_t S = 6;
  const std::size_t grain = 64;
  std::vector<std::array<SuiteCount, S>> part(chunk_count(cfg.words, grain));
  parallel_chunks(cfg.words, grain, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto& acc = part[c];
    auto record = [&](std::size_t s, bool ok, const Word& w) {
      ++acc[s].checked;
      if (!ok && acc[s].failures++ == 0) acc[s].first_failure = to_string(w);
    };
    for (std::size_t i = b; i < e; ++i) {
      Rng rng(split_seed(cfg.seed, i));
      std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * cfg.max_length);
      Word w = random_word(rng, alph, len);
      ContinuantPair pq = continuants(w);
      record(0, Rational(pq.p, pq.q) == nested_fraction(w), w);
      bool det_ok = true;
      try {
        check_determinant(w);
      } catch (const Error& err) {
        if (err.code() != Errc::identity) throw;
        det_ok = false;
      }
      record(1, det_ok, w);
      record(2, mirror_identities(w).ok, w);
      record(3, length_bounds_check(w), w);
      bool quasi_ok = true;
      for (std::size_t k = 1; k < w.size(); ++k) {
        Rational r = quasi_multiplicativity(w, k);
        quasi_ok &= r >= Rational(1, 2) && r <= Rational(4);
      }
      record(4, quasi_ok, w);
    }
  });
  std::size_t pairs = sys.kind() == MapKind::gauss ? cfg.pairs : 0;
  std::vector<SuiteCount> dd(chunk_count(pairs, grain));
  parallel_chunks(pairs, grain, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng(split_seed(cfg.seed ^ 0x5bd1e995ull, i));
      std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 10);
      Word u = random_word(rng, alph, len), v = random_word(rng, alph, len);
      for (int g = 0; g <= 16; ++g) {
        ++dd[c].checked;
        if (!distdioph_check(sys, u, v, Rational(g, 16)).ok && dd[c].failures++ == 0)
          dd[c].first_failure = to_string(u) + "|" + to_string(v);
      }
    }
  });
  std::array<SuiteCount, S> tot;
  for (const auto& p : part)
    for (std::size_t s = 0; s < 5; ++s) {
      tot[s].checked += p[s].checked;
      if (tot[s].failures == 0 && p[s].failures) tot[s].first_failure = p[s].first_failure;
      tot[s].failures += p[s].failures;
    }
  for (const auto& p : dd) {
    tot[5].checked += p.checked;
    if (tot[5].failures == 0 && p.failures) tot[5].first_failure = p.first_failure;
    tot[5].failures += p.failures;
  }
  Csv csv({"suite", "checked", "failures", "first_failure"});
  json suites;
  std::uint64_t failures = 0;
  for (std::size_t s = 0; s < S; ++s) {
    csv.cell(std::string(names[s])).cell(tot[s].checked).cell(tot[s].failures).cell(tot[s].first_failure).end_row();
    suites[names[s]] = {{"checked", tot[s].checked}, {"failures", tot[s].failures}};
    failures += tot[s].failures;
  }
  json summary;
  summary["suites"] = suites;
  summary["fitted_exponents"] = json::object();
  summary["total_failures"] = failures;
  if (failures) return finish(cfg, csv, summary, t0, 1, "identity failures: " + std::to_string(failures));
  return finish(cfg, csv, summary, t0);
}

CommandOutcome cmd_decay(const RunConfig& cfg) {
  auto t0 = Clock::now();
  GibbsSpec spec = spec_from_config(cfg);
  check_budget(spec.alphabet, cfg.n, cfg.budget);
  CylinderMeasure mu = gibbs_measure(spec, cfg.n);
  DiscreteMeasure m = mu.discrete();
  double max_len = std::exp(*std::max_element(mu.log_len.begin(), mu.log_len.end()));
  DecayOptions opt;
  opt.j_lo = cfg.j_lo;
  opt.j_hi = cfg.j_hi;
  opt.samples_per_block = cfg.samples;
  DecayScan scan = decay_scan(m, max_len, opt);
  Csv csv({"j", "xi_lo", "xi_hi", "sup_abs", "n_samples", "aliased"});
  for (const auto& b : scan.blocks)
    csv.cell(b.j).cell(b.xi_lo).cell(b.xi_hi).cell(b.sup_abs).cell(b.n_samples).cell(b.aliased).end_row();
  json summary;
  summary["fitted_exponents"] = {{"e_hat", scan.e_hat}, {"ci_lo", scan.ci_lo}, {"ci_hi", scan.ci_hi},
                                 {"residual", scan.residual}, {"fit_blocks", scan.fit_blocks}};
  summary["xi_max"] = scan.xi_max;
  summary["min_atom_gap"] = scan.min_atom_gap;
  summary["atoms"] = m.size();
  summary["s"] = spec.s;
  summary["sampled_sup"] = true;
  if (scan.fit_blocks == 0) return finish(cfg, csv, summary, t0, 3, "every dyadic block is in the aliasing regime");
  return finish(cfg, csv, summary, t0);
}

namespace {

struct TreeBundle {
  GibbsSpec spec;
  FrozenConstants constants;
  RegularTree tree;
};

TreeBundle build_tree(const RunConfig& cfg) {
  GibbsSpec spec = spec_from_config(cfg);
  check_budget(spec.alphabet, cfg.n, cfg.budget);
  FrozenConstants c = estimate_constants(spec, reference_depth(spec));
  RegularTree tree = regular_words(spec, c.lambda_hat, c.s_hat);
  return {spec, c, std::move(tree)};
}

json tree_json(const TreeBundle& b) {
  return {{"lambda_hat", b.constants.lambda_hat}, {"s_hat", b.constants.s_hat}, {"n_ref", b.constants.n_ref},
          {"tree_size", b.tree.size()},          {"kept_mass", b.tree.kept_mass}, {"gibbs_constant", b.tree.gibbs_constant},
          {"s", b.spec.s},
          {"corridor_nondegenerate", b.spec.corridor_nondegenerate(b.constants.lambda_hat)}};
}

}  // namespace

CommandOutcome cmd_nonconc(const RunConfig& cfg) {
  auto t0 = Clock::now();
  TreeBundle b = build_tree(cfg);
  NonConcReport rep = nonlinearity_report(b.tree);
  Csv csv({"n", "rho", "count", "bound", "ok"});
  for (const auto& r : rep.rows) csv.cell(rep.n).cell(r.rho).cell(r.count).cell(r.bound).cell(r.ok).end_row();
  json summary = tree_json(b);
  summary["fitted_exponents"] = {{"kappa_hat", rep.kappa_hat},
                                 {"C0_hat", rep.C0_hat},
                                 {"residual", rep.residual},
                                 {"s_hat_half", b.constants.s_hat / 2}};
  summary["x_grid_slack"] = rep.x_grid_slack;
  return finish(cfg, csv, summary, t0);
}

CommandOutcome cmd_expsum(const RunConfig& cfg) {
  auto t0 = Clock::now();
  TreeBundle b = build_tree(cfg);
  double s0;
  double kappa = NAN;
  if (cfg.s0) {
    s0 = *cfg.s0;
  } else {
    kappa = nonlinearity_report(b.tree).kappa_hat;
    s0 = std::min(kappa, b.constants.s_hat) / 4;
  }
  WellDistributed wd = well_distributed_blocks(b.tree, cfg.k, s0, cfg.eps3);
  ExpSumScan scan = expsum_decay_scan(b.tree, wd, eta_grid(b.tree, cfg.eta_points), cfg.blocks, cfg.seed);
  Csv csv({"eta", "max_abs", "n_blocks_sampled"});
  for (const auto& r : scan.rows) csv.cell(r.eta).cell(r.max_abs).cell(static_cast<std::uint64_t>(r.n_blocks)).end_row();
  json summary = tree_json(b);
  summary["fitted_exponents"] = {{"eps2_hat", scan.eps2_hat}, {"ci_lo", scan.ci_lo}, {"ci_hi", scan.ci_hi},
                                 {"residual", scan.residual}};
  summary["window"] = {scan.eta_lo, scan.eta_hi};
  summary["excluded_eta"] = scan.excluded;
  summary["xi_scale"] = scan.xi_scale;
  summary["s0"] = s0;
  summary["kappa_hat"] = std::isnan(kappa) ? json(nullptr) : json(kappa);
  summary["kept_blocks"] = wd.kept_blocks;
  summary["total_blocks"] = wd.total_blocks;
  summary["complement_fraction"] = wd.complement_fraction;
  return finish(cfg, csv, summary, t0);
}

namespace {

SequenceSpec sequence_from_config(const RunConfig& cfg, std::size_t need) {
  const std::string& s = cfg.seq;
  if (s == "identity") return SequenceSpec::identity();
  if (s == "pell") return SequenceSpec::continuant(Word(need, 2));
  if (s == "fibonacci") return SequenceSpec::continuant(Word(need, 1));
  if (s.rfind("digits:", 0) == 0) {
    Word base;
    std::istringstream ss(s.substr(7));
    std::string t;
    while (std::getline(ss, t, ',')) {
      if (t.empty()) continue;
      try {
        base.push_back(static_cast<Digit>(std::stoul(t)));
      } catch (const std::exception&) {
        fail(Errc::config, "bad digit in sequence: " + t);
      }
    }
    if (base.empty()) fail(Errc::config, "empty digit list");
    Word w(need);
    for (std::size_t i = 0; i < need; ++i) w[i] = base[i % base.size()];
    return SequenceSpec::continuant(std::move(w));
  }
  if (s.rfind("file:", 0) == 0) {
    std::istringstream ss(read_file(s.substr(5)));
    std::vector<BigInt> v;
    std::string line;
    while (std::getline(ss, line)) {
      line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                 line.end());
      if (line.empty()) continue;
      try {
        v.emplace_back(line);
      } catch (const std::exception&) {
        fail(Errc::config, "bad integer in sequence file: " + line);
      }
    }
    return SequenceSpec::explicit_list(std::move(v));
  }
  fail(Errc::config, "unknown sequence: " + s);
}

}  // namespace

CommandOutcome cmd_equidist(const RunConfig& cfg) {
  auto t0 = Clock::now();
  const std::size_t Nmax = cfg.N_grid.back();
  SequenceSpec seq = sequence_from_config(cfg, Nmax);
  if (Nmax > seq.available()) fail(Errc::config, "N exceeds the sequence length");
  std::vector<Rational> xs;
  std::vector<std::size_t> lengths;
  json summary;
  if (cfg.x) {
    xs.push_back(parse_rational(*cfg.x));
    lengths.push_back(0);
  } else {
    GibbsSpec spec = spec_from_config(cfg);
    double bits = boost::multiprecision::msb(seq.term(Nmax)) + 1 + std::log2(static_cast<double>(cfg.m_max)) + 64;
    std::size_t L = length_for_bits(spec.system, spec.alphabet, bits);
    if (static_cast<double>(L) * cfg.points > static_cast<double>(cfg.budget)) fail(Errc::resource, "sample length exceeds budget");
    xs.resize(cfg.points);
    lengths.assign(cfg.points, L);
    parallel_chunks(cfg.points, 1, [&](std::size_t i, std::size_t, std::size_t) {
      xs[i] = sample_point(spec, L, split_seed(cfg.seed, i)).x;
    });
    summary["s"] = spec.s;
    summary["sample_length"] = L;
  }
  Csv csv({"point", "m", "N", "re_W", "im_W", "abs_W", "del_partial"});
  double worst_final = 0;
  json xs_json = json::array();
  for (std::size_t p = 0; p < xs.size(); ++p) {
    auto rows = del_report(xs[p], seq, cfg.m_max, cfg.N_grid);
    for (const auto& r : rows) {
      csv.cell(static_cast<std::uint64_t>(p)).cell(r.m).cell(static_cast<std::uint64_t>(r.N));
      csv.cell(r.w.real()).cell(r.w.imag()).cell(std::abs(r.w)).cell(r.del_partial).end_row();
      if (r.N == Nmax) worst_final = std::max(worst_final, std::abs(r.w));
    }
    xs_json.push_back(to_double(xs[p]));
  }
  summary["x"] = xs_json;
  summary["max_abs_W_at_Nmax"] = worst_final;
  summary["fitted_exponents"] = json::object();
  return finish(cfg, csv, summary, t0);
}

CommandOutcome cmd_largedev(const RunConfig& cfg) {
  auto t0 = Clock::now();
  GibbsSpec spec = spec_from_config(cfg);
  check_budget(spec.alphabet, cfg.n_list.back() + 4, cfg.budget);
  LargeDevResult res = large_deviation_scan(spec, cfg.epsilon, cfg.n_list);
  Csv csv({"n", "complement_mass"});
  for (const auto& r : res.rows) csv.cell(r.n).cell(r.complement_mass).end_row();
  json summary;
  summary["fitted_exponents"] = {{"delta_hat", res.delta_hat}, {"residual", res.fit.residual_rms},
                                 {"ci_lo", -res.fit.ci_hi}, {"ci_hi", -res.fit.ci_lo}};
  summary["lambda_hat"] = res.constants.lambda_hat;
  summary["s_hat"] = res.constants.s_hat;
  summary["n_ref"] = res.constants.n_ref;
  return finish(cfg, csv, summary, t0);
}

CommandOutcome run_command(const RunConfig& cfg) {
  cfg.validate();
  prepare_out(cfg);
  if (cfg.command == "identities") return cmd_identities(cfg);
  if (cfg.command == "decay") return cmd_decay(cfg);
  if (cfg.command == "nonconc") return cmd_nonconc(cfg);
  if (cfg.command == "expsum") return cmd_expsum(cfg);
  if (cfg.command == "equidist") return cmd_equidist(cfg);
  return cmd_largedev(cfg);
}

}  // namespace gfd
