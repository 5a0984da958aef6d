// zrec: configuration-driven experiment runner.
//
//   zrec <subcommand> [--config manifest.json] [--preset name] [--seed u64]
//        [--workers n] [--out dir] [subcommand options]
//   zrec report --out dir verdicts.json...
//
// Flags override config-file values.  ZREC_WORKERS sets the default worker
// count; outputs are bit-identical for any worker count.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zrec/io.hpp"
#include "zrec/presets.hpp"
#include "zrec/runner.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace {

void apply_workers(int workers) {
#if defined(_OPENMP)
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

int default_workers() {
  if (const char* env = std::getenv("ZREC_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recurrence-time experiments for Z-extensions of subshifts"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, model_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = default_workers();

  // shared options added to each experiment subcommand
  std::vector<CLI::App*> subs;
  for (const std::string& kind : zrec::runner::known_kinds()) {
    CLI::App* s = app.add_subcommand(kind, "run the " + kind + " experiment");
    s->add_option("--config", config_path, "manifest JSON path");
    s->add_option("--preset", preset, "model preset name");
    s->add_option("--model", model_path, "inline model JSON path");
    s->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; }, "master seed");
    s->add_option("--workers", workers, "worker threads (default: ZREC_WORKERS or all)");
    s->add_option("--out", out_dir, "output directory");
    subs.push_back(s);
  }

  CLI::App* rep = app.add_subcommand("report", "aggregate verdicts.json files");
  std::vector<std::string> verdict_files;
  rep->add_option("--out", out_dir, "output directory for report.json");
  rep->add_option("files", verdict_files, "verdicts.json paths")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (rep->parsed()) {
      const auto res = zrec::runner::report(verdict_files, out_dir);
      std::size_t pass = 0;
      for (const auto& v : res.verdicts)
        if (v.pass) ++pass;
      std::cout << "report: " << pass << "/" << res.verdicts.size()
                << " verdicts pass\n";
      for (const auto& v : res.verdicts)
        std::cout << (v.pass ? "  [pass] " : "  [FAIL] ") << v.name
                  << "  statistic=" << v.statistic << " threshold=" << v.threshold
                  << "\n";
      return res.exit_code;
    }

    zrec::Manifest manifest;
    if (!config_path.empty())
      manifest = zrec::Manifest::from_json_text(zrec::read_text_file(config_path));
    for (CLI::App* s : subs)
      if (s->parsed()) manifest.kind = s->get_name();
    if (!preset.empty()) manifest.preset = preset;
    if (!model_path.empty()) manifest.model_json = zrec::read_text_file(model_path);
    if (seed_set) manifest.seed = seed;
    if (!out_dir.empty()) manifest.out_dir = out_dir;
    manifest.workers = workers;
    apply_workers(workers);

    const auto res = zrec::runner::run(manifest);
    for (const auto& v : res.verdicts)
      std::cout << (v.pass ? "[pass] " : "[FAIL] ") << v.name
                << "  statistic=" << v.statistic << " threshold=" << v.threshold
                << (v.note.empty() ? "" : "  (" + v.note + ")") << "\n";
    std::cout << (res.exit_code == 0 ? "OK" : "FAILED") << "; outputs under "
              << manifest.out_dir << "\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
