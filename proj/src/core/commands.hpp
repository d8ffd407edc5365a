#pragma once

#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/thermo.hpp"

namespace gfd {

struct CommandOutcome {
  int exit_code = 0;
  std::string message;
  std::string csv_path;
  std::string json_path;
};

// 0 ok, 2 budget, 3 aliasing-only scan, 1 anything else.
int exit_code_for(Errc e);

// Validates, dispatches on cfg.command, writes <out>/<command>.csv and .json.
CommandOutcome run_command(const RunConfig& cfg);

CommandOutcome cmd_identities(const RunConfig& cfg);
CommandOutcome cmd_decay(const RunConfig& cfg);
CommandOutcome cmd_nonconc(const RunConfig& cfg);
CommandOutcome cmd_expsum(const RunConfig& cfg);
CommandOutcome cmd_equidist(const RunConfig& cfg);
CommandOutcome cmd_largedev(const RunConfig& cfg);

// Spec from the config: bernoulli when weights are given or map is cantor, else geometric with s
// defaulting to the collocation dimension root.
GibbsSpec spec_from_config(const RunConfig& cfg);
// Reference depth for frozen constants within the budget.
int reference_depth(const GibbsSpec& spec);
Rational parse_rational(const std::string& text);

}  // namespace gfd
