#include "gfdecay/gfdecay.h"

#include <cstring>
#include <new>
#include <string>

#include "core/commands.hpp"
#include "core/csv.hpp"
#include "core/fourier.hpp"

struct gf_config {
  gfd::RunConfig cfg;
};
struct gf_system {
  gfd::MarkovSystem sys;
};
struct gf_measure {
  gfd::DiscreteMeasure m;
};

namespace {

thread_local std::string g_last_error;

gf_status to_status(gfd::Errc e) {
  switch (e) {
    case gfd::Errc::domain: return GF_ERR_DOMAIN;
    case gfd::Errc::structural: return GF_ERR_STRUCTURAL;
    case gfd::Errc::resource: return GF_ERR_RESOURCE;
    case gfd::Errc::degenerate: return GF_ERR_DEGENERATE;
    case gfd::Errc::identity: return GF_ERR_IDENTITY;
    case gfd::Errc::unsupported: return GF_ERR_UNSUPPORTED;
    case gfd::Errc::io: return GF_ERR_IO;
    case gfd::Errc::config: return GF_ERR_CONFIG;
    case gfd::Errc::aliasing: return GF_ERR_ALIASING;
  }
  return GF_ERR_INTERNAL;
}

template <class F>
gf_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return GF_OK;
  } catch (const gfd::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GF_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GF_ERR_INTERNAL;
  }
}

gf_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return GF_ERR_NULL;
}

gfd::MarkovSystem make_system(gf_map map, uint32_t cutoff) {
  switch (map) {
    case GF_MAP_GAUSS: return gfd::MarkovSystem::gauss(cutoff);
    case GF_MAP_LUEROTH: return gfd::MarkovSystem::lueroth(cutoff);
    case GF_MAP_CANTOR: return gfd::MarkovSystem::cantor();
  }
  gfd::fail(gfd::Errc::config, "unknown map id");
}

gfd::Word make_word(const uint32_t* w, size_t len) { return gfd::Word(w, w + len); }

void copy_out(const std::string& s, char* buf, size_t cap) {
  if (s.size() + 1 > cap) gfd::fail(gfd::Errc::structural, "buffer too small, need " + std::to_string(s.size() + 1));
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

}  // namespace

extern "C" {

const char* gf_last_error(void) { return g_last_error.c_str(); }

const char* gf_status_name(gf_status s) {
  switch (s) {
    case GF_OK: return "ok";
    case GF_ERR_DOMAIN: return "domain";
    case GF_ERR_STRUCTURAL: return "structural";
    case GF_ERR_RESOURCE: return "resource";
    case GF_ERR_DEGENERATE: return "degenerate";
    case GF_ERR_IDENTITY: return "identity";
    case GF_ERR_UNSUPPORTED: return "unsupported";
    case GF_ERR_IO: return "io";
    case GF_ERR_CONFIG: return "config";
    case GF_ERR_ALIASING: return "aliasing";
    case GF_ERR_NULL: return "null";
    case GF_ERR_BUFFER: return "buffer";
    case GF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

gf_status gf_config_create(const char* command, gf_config** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto* c = new gf_config;
    if (command) c->cfg.command = command;
    *out = c;
  });
}

void gf_config_destroy(gf_config* cfg) { delete cfg; }

gf_status gf_config_set(gf_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return null_arg("cfg/key/value");
  return guarded([&] { cfg->cfg.set(key, value); });
}

gf_status gf_config_set_real(gf_config* cfg, const char* key, double value) {
  if (!cfg || !key) return null_arg("cfg/key");
  return guarded([&] { cfg->cfg.set(key, gfd::format_real(value)); });
}

gf_status gf_config_set_int(gf_config* cfg, const char* key, int64_t value) {
  if (!cfg || !key) return null_arg("cfg/key");
  return guarded([&] { cfg->cfg.set(key, std::to_string(value)); });
}

gf_status gf_config_load_json(gf_config* cfg, const char* path) {
  if (!cfg || !path) return null_arg("cfg/path");
  return guarded([&] { cfg->cfg.load_json(path); });
}

int gf_exit_code(gf_status s) {
  switch (s) {
    case GF_OK: return 0;
    case GF_ERR_RESOURCE: return 2;
    case GF_ERR_ALIASING: return 3;
    default: return 1;
  }
}

gf_status gf_run(const gf_config* cfg, int* exit_code) {
  if (!cfg) return null_arg("cfg");
  int code = 1;
  gf_status st = guarded([&] {
    gfd::CommandOutcome o = gfd::run_command(cfg->cfg);
    code = o.exit_code;
    if (code != 0) g_last_error = o.message;
  });
  if (st != GF_OK) code = gf_exit_code(st);
  if (exit_code) *exit_code = code;
  return st;
}

gf_status gf_system_create(gf_map map, uint32_t cutoff, gf_system** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new gf_system{make_system(map, cutoff)}; });
}

void gf_system_destroy(gf_system* sys) { delete sys; }

gf_status gf_branch_point(const gf_system* sys, const uint32_t* word, size_t len, double x, double* out) {
  if (!sys || (!word && len) || !out) return null_arg("sys/word/out");
  return guarded([&] { *out = gfd::branch_point(sys->sys, make_word(word, len), x); });
}

gf_status gf_branch_derivative(const gf_system* sys, const uint32_t* word, size_t len, double x, double* out) {
  if (!sys || (!word && len) || !out) return null_arg("sys/word/out");
  return guarded([&] { *out = gfd::branch_derivative(sys->sys, make_word(word, len), x); });
}

gf_status gf_distortion(const gf_system* sys, const uint32_t* word, size_t len, double x, double* out) {
  if (!sys || (!word && len) || !out) return null_arg("sys/word/out");
  return guarded([&] { *out = gfd::distortion(sys->sys, make_word(word, len), x); });
}

gf_status gf_cylinder(const gf_system* sys, const uint32_t* word, size_t len, double* lo, double* hi) {
  if (!sys || (!word && len) || !lo || !hi) return null_arg("sys/word/lo/hi");
  return guarded([&] {
    gfd::Interval iv = gfd::cylinder(sys->sys, make_word(word, len));
    *lo = iv.lo;
    *hi = iv.hi;
  });
}

gf_status gf_continuants(const uint32_t* word, size_t len, char* p, size_t p_cap, char* q, size_t q_cap) {
  if ((!word && len) || !p || !q) return null_arg("word/p/q");
  gf_status st = guarded([&] {
    gfd::ContinuantPair c = gfd::continuants(make_word(word, len));
    std::string ps = c.p.str(), qs = c.q.str();
    copy_out(ps, p, p_cap);
    copy_out(qs, q, q_cap);
  });
  if (st == GF_ERR_STRUCTURAL) return GF_ERR_BUFFER;
  return st;
}

gf_status gf_measure_gibbs(gf_map map, uint32_t lo, uint32_t hi, double s, int n, gf_measure** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    gfd::MarkovSystem sys = make_system(map, hi);
    gfd::GibbsSpec spec = map == GF_MAP_CANTOR
                              ? gfd::make_bernoulli_spec(sys, {lo, hi}, std::vector<double>(hi - lo + 1, 1.0), n, 0.2, 1ull << 24)
                              : gfd::make_spec(sys, {lo, hi}, s, n, 0.2, 1ull << 24);
    gfd::check_budget(spec.alphabet, n, spec.budget);
    *out = new gf_measure{gfd::gibbs_measure(spec, n).discrete()};
  });
}

void gf_measure_destroy(gf_measure* m) { delete m; }

size_t gf_measure_size(const gf_measure* m) { return m ? m->m.size() : 0; }

gf_status gf_measure_atoms(const gf_measure* m, double* atoms, double* weights, size_t cap) {
  if (!m) return null_arg("m");
  if (cap < m->m.size() && (atoms || weights)) {
    g_last_error = "buffer too small, need " + std::to_string(m->m.size());
    return GF_ERR_BUFFER;
  }
  for (size_t i = 0; i < m->m.size(); ++i) {
    if (atoms) atoms[i] = m->m.atoms[i];
    if (weights) weights[i] = m->m.weights[i];
  }
  return GF_OK;
}

gf_status gf_fourier_transform(const gf_measure* m, double xi, double* re, double* im) {
  if (!m || !re || !im) return null_arg("m/re/im");
  return guarded([&] {
    auto v = gfd::fourier_transform(m->m, xi);
    *re = v.real();
    *im = v.imag();
  });
}

gf_status gf_pressure_root(gf_map map, uint32_t lo, uint32_t hi, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = gfd::collocation_root(make_system(map, hi), {lo, hi}); });
}

}  // extern "C"
