// Named model presets and JSON model loading.
//
// JSON schema (documented for the CLI):
// {
//   "alphabet": 3,
//   "transition": [[1,1,1],[1,1,1],[1,1,1]],
//   "potential": {"depth": 2, "entries": [{"word": [0,0], "value": -2.99}, ...]},
//   "step":      {"depth": 1, "entries": [{"word": [0],   "value": 1}, ...]}
// }
// Entries must cover exactly the transition-allowed words of their depth.
// Depths above 2 are recoded to the block alphabet on build.

#pragma once

#include <string>
#include <vector>

#include "zrec/gibbs.hpp"

namespace zrec {

struct ModelDefinition {
  std::string name;
  SubshiftSpec spec;
  WordTable potential;
  WordTable step;
  bool has_step = false;
};

struct BuiltModel {
  std::string name;
  GibbsMarkov gibbs;
  StepFunction step;
  bool has_step = false;
};

// Builds (recoding depth > 2 tables first) and validates the step function.
BuiltModel build_model(const ModelDefinition& def);

// Presets:
//   uniform-2shift     full 2-shift, uniform Bernoulli, step +1/-1 (arithmetic)
//   lazy-walk          full 3-shift, Bernoulli(.05,.05,.90), step +1/-1/0
//   lazy-walk-q25      same with q = 0.25
//   golden-mean        golden-mean SFT, Parry measure, depth-3 integer step
//   bernoulli-37       full 2-shift, Bernoulli(.3,.7), depth-2 step (7,-3,0,0)
//   bernoulli-91-arith full 2-shift, Bernoulli(.9,.1), step +1/-9 (lattice 10)
ModelDefinition get_preset(const std::string& name);
std::vector<std::string> preset_names();

// Pilot-calibrated step caps for tau experiments on the lazy-walk preset
// (roughly 20-25% censoring; medians stay uncensored).  Other presets fall
// back to a generic exponential-in-k rule.
std::uint64_t recommended_tau_cap(const std::string& preset_name, int k);

// Parse/serialise the documented JSON schema (throws std::invalid_argument
// with the offending field path).
ModelDefinition model_from_json_text(const std::string& text);
std::string model_to_json_text(const ModelDefinition& def);

}  // namespace zrec
