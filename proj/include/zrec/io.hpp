// Experiment manifests, deterministic output files, and verdict records.
//
// A manifest fully determines an experiment's outputs: data files are
// byte-identical across re-runs and across worker counts (worker count and
// output directory are invocation details, canonicalised out of the manifest
// identity and its hash).  Every output file embeds the manifest hash.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zrec {

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

// Deterministic float formatting for data files ("%.17g", classic locale).
std::string fmt_double(double v);

struct Manifest {
  std::string kind;        // experiment subcommand
  std::string preset;      // preset name ("" when model_json given)
  std::string model_json;  // inline model definition (canonical text)
  std::uint64_t seed = 1;
  std::string version = "0.1.0";

  // parameters; relevance depends on kind
  std::vector<int> k_list;
  std::vector<double> eps_list;
  std::vector<std::int64_t> n_list;
  std::uint64_t n_samples = 0;
  std::vector<std::uint64_t> step_caps;  // one entry, or one per k
  int grid_size = 1024;
  int dim = 1;
  double eps = 0.0;
  std::string mode = "idealized";  // toy: idealized | faithful
  std::uint64_t rn_n = 1000;       // toy-rn: the n of R_n

  // invocation details (not hashed, not written to the resolved manifest)
  std::string out_dir;
  int workers = 0;

  std::string canonical_json() const;  // resolved manifest text
  std::uint64_t hash() const { return fnv1a64(canonical_json()); }

  static Manifest from_json_text(const std::string& text);
};

struct Verdict {
  std::string name;
  double statistic = 0.0;
  std::uint64_t n = 0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

std::string verdicts_to_json(const std::vector<Verdict>& verdicts,
                             std::uint64_t manifest_hash);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace zrec
