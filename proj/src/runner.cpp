#include "zrec/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "zrec/gibbs.hpp"
#include "zrec/limit_laws.hpp"
#include "zrec/presets.hpp"
#include "zrec/spectral.hpp"
#include "zrec/toy_walk.hpp"
#include "zrec/zext.hpp"

namespace zrec {
namespace runner {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outputs {
  const Manifest* m;
  std::string dir;
  std::uint64_t hash;
  std::vector<std::string> files;

  explicit Outputs(const Manifest& man) : m(&man), dir(man.out_dir), hash(man.hash()) {
    if (dir.empty()) throw std::invalid_argument("manifest.out_dir: required");
    fs::create_directories(dir);
    write(std::string("manifest.json"), man.canonical_json() + "\n");
  }

  std::string header() const { return "# manifest_hash=" + hex64(hash) + "\n"; }

  void write(const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    write_text_file(path, content);
    files.push_back(path);
  }

  void write_verdicts(const std::vector<Verdict>& v) {
    write("verdicts.json", verdicts_to_json(v, hash) + "\n");
  }
};

BuiltModel model_for(const Manifest& m) {
  if (!m.model_json.empty()) return build_model(model_from_json_text(m.model_json));
  if (m.preset.empty())
    throw std::invalid_argument("manifest.preset: required when no inline model is given");
  return build_model(get_preset(m.preset));
}

std::vector<std::uint64_t> caps_for(const Manifest& m, const std::string& preset) {
  if (!m.step_caps.empty()) {
    if (m.step_caps.size() != 1 && m.step_caps.size() != m.k_list.size())
      throw std::invalid_argument("manifest.step_caps: need one entry or one per k");
    return m.step_caps;
  }
  std::vector<std::uint64_t> caps;
  caps.reserve(m.k_list.size());
  for (int k : m.k_list) caps.push_back(recommended_tau_cap(preset, k));
  return caps;
}

double median_sorted(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("median of empty set");
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return median_sorted(v);
}

// ---------------------------------------------------------------------------
// toy experiments
// ---------------------------------------------------------------------------

toy::ToyConfig toy_config(const Manifest& m) {
  toy::ToyConfig cfg;
  cfg.dim = m.dim;
  cfg.eps = m.eps;
  cfg.mode = m.mode == "faithful" ? toy::TauMode::Faithful : toy::TauMode::Idealized;
  cfg.ball_constant = toy::unit_ball_volume(m.dim);
  cfg.validate();
  return cfg;
}

RunResult run_toy_tau(const Manifest& m) {
  Outputs out(m);
  const toy::ToyConfig cfg = toy_config(m);
  const std::uint64_t cap = m.step_caps.empty() ? (1ull << 36) : m.step_caps[0];
  const auto samples = toy::sample_tau_batch(cfg, m.seed, 0, m.n_samples, cap);

  std::ostringstream csv;
  csv << out.header() << "sample_index,tau,t_count,censored\n";
  std::vector<double> scaled;
  std::size_t censored = 0;
  const double lam = cfg.hit_probability();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    csv << i << "," << s.tau << "," << s.t_count << "," << (s.censored ? 1 : 0) << "\n";
    if (s.censored) ++censored;
    else scaled.push_back(lam * std::sqrt(static_cast<double>(s.tau)));
  }
  out.write("samples.csv", csv.str());

  const double thr = lam * std::sqrt(static_cast<double>(cap));
  const auto emp = EmpiricalDistribution::from_censored(scaled, censored, thr);
  Verdict ks;
  ks.name = "toy_tau_ks_vs_exp_over_abs_normal";
  ks.statistic = ks_distance(emp, ReferenceLaw::exp_over_abs_normal(1.0));
  ks.n = samples.size();
  ks.threshold = 0.03;
  ks.pass = ks.statistic <= ks.threshold;
  ks.note = "censored fraction " + fmt_double(static_cast<double>(censored) /
                                              static_cast<double>(samples.size()));
  std::vector<Verdict> verdicts{ks};
  out.write_verdicts(verdicts);
  return {ks.pass ? 0 : 1, verdicts, out.files};
}

RunResult run_toy_rn(const Manifest& m) {
  Outputs out(m);
  const auto scaled = toy::sample_rn_scaled_batch(m.rn_n, m.seed, 0, m.n_samples);
  std::ostringstream csv;
  csv << out.header() << "sample_index,rn_over_n2\n";
  for (std::size_t i = 0; i < scaled.size(); ++i)
    csv << i << "," << fmt_double(scaled[i]) << "\n";
  out.write("samples.csv", csv.str());

  Verdict ks;
  ks.name = "toy_rn_ks_vs_levy";
  ks.statistic = ks_distance(EmpiricalDistribution::from_samples(scaled),
                             ReferenceLaw::inverse_normal_squared());
  ks.n = scaled.size();
  ks.threshold = 0.015;
  ks.pass = ks.statistic <= ks.threshold;
  std::vector<Verdict> verdicts{ks};
  out.write_verdicts(verdicts);
  return {ks.pass ? 0 : 1, verdicts, out.files};
}

RunResult run_toy_exponent(const Manifest& m) {
  Outputs out(m);
  if (m.eps_list.size() < 3)
    throw std::invalid_argument("manifest.eps_list: need >= 3 epsilons");
  std::ostringstream csv;
  csv << out.header() << "eps,median_tau,censor_fraction\n";
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < m.eps_list.size(); ++i) {
    toy::ToyConfig cfg;
    cfg.dim = m.dim;
    cfg.eps = m.eps_list[i];
    cfg.mode = toy::TauMode::Idealized;
    cfg.ball_constant = toy::unit_ball_volume(m.dim);
    cfg.validate();
    const std::uint64_t cap = m.step_caps.empty() ? (1ull << 36) : m.step_caps[0];
    const auto samples =
        toy::sample_tau_batch(cfg, m.seed, i * m.n_samples, m.n_samples, cap);
    std::vector<double> taus;
    std::size_t censored = 0;
    for (const auto& s : samples) {
      taus.push_back(static_cast<double>(s.tau));
      if (s.censored) ++censored;
    }
    const double med = median_of(taus);
    csv << fmt_double(cfg.eps) << "," << fmt_double(med) << ","
        << fmt_double(static_cast<double>(censored) / static_cast<double>(samples.size()))
        << "\n";
    xs.push_back(-std::log(cfg.eps));
    ys.push_back(std::log(med));
  }
  out.write("exponent.csv", csv.str());

  const RegressionResult reg = exponent_regression(xs, ys);
  Verdict v;
  v.name = "toy_exponent_slope";
  v.statistic = reg.slope;
  v.n = m.eps_list.size();
  v.threshold = 2.0;  // target 2d with d = dim... recurrence exponent 2*dim
  v.pass = reg.slope >= 1.7 && reg.slope <= 2.3;
  v.note = "r2 " + fmt_double(reg.r2);
  std::vector<Verdict> verdicts{v};
  out.write_verdicts(verdicts);
  return {v.pass ? 0 : 1, verdicts, out.files};
}

// ---------------------------------------------------------------------------
// subshift experiments
// ---------------------------------------------------------------------------

RunResult run_sft_build(const Manifest& m) {
  Outputs out(m);
  const BuiltModel model = model_for(m);
  const GibbsMarkov& g = model.gibbs;
  json j;
  j["manifest_hash"] = hex64(out.hash);
  j["name"] = model.name;
  j["alphabet"] = g.alphabet();
  j["block_length"] = g.block_length;
  j["perron_value"] = g.perron_value;
  j["entropy"] = g.entropy;
  j["dimension"] = g.dimension;
  j["sigma2_h"] = sigma2_h(g);
  j["stationary"] = g.stationary;
  j["transitions"] = g.transitions;
  if (model.has_step) {
    j["step_mean_residual"] = model.step.mean_residual;
    j["sigma2_phi"] = sigma2_step(g, model.step);
  }
  out.write("build.json", j.dump(2) + "\n");

  Verdict v;
  v.name = "sft_build_stationarity";
  double worst = 0.0;
  for (int b = 0; b < g.alphabet(); ++b) {
    double s = 0.0;
    for (int a = 0; a < g.alphabet(); ++a) s += g.stationary[a] * g.pi(a, b);
    worst = std::max(worst, std::abs(s - g.stationary[b]));
  }
  v.statistic = worst;
  v.threshold = 1e-12;
  v.n = g.alphabet();
  v.pass = worst <= v.threshold;
  std::vector<Verdict> verdicts{v};
  out.write_verdicts(verdicts);
  return {v.pass ? 0 : 1, verdicts, out.files};
}

RunResult run_sft_spectral(const Manifest& m) {
  Outputs out(m);
  const BuiltModel model = model_for(m);
  if (!model.has_step) throw std::invalid_argument("sft-spectral: model needs a step function");
  const SpectralCurve curve =
      nonarithmeticity_scan(model.gibbs, model.step, m.grid_size);

  std::ostringstream csv;
  csv << out.header() << "u,re_lambda,im_lambda,radius\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    csv << fmt_double(curve.grid[i]) << "," << fmt_double(curve.leading[i].real())
        << "," << fmt_double(curve.leading[i].imag()) << ","
        << fmt_double(curve.radius[i]) << "\n";
  out.write("curve.csv", csv.str());

  std::vector<Verdict> verdicts;
  Verdict na;
  na.name = "nonarithmeticity_scan";
  na.statistic = *std::max_element(curve.radius.begin() + curve.grid.size() / 2 + 1,
                                   curve.radius.end());
  na.threshold = 1.0 - 1e-6;
  na.n = curve.grid.size();
  na.pass = curve.nonarithmetic;
  if (curve.offending_u) na.note = "offending u " + fmt_double(*curve.offending_u);
  verdicts.push_back(na);

  const Sigma2Result s2 = sigma2_from_curve(model.gibbs, model.step);
  Verdict sv;
  sv.name = "sigma2_spectral_vs_green_kubo";
  sv.statistic = std::abs(s2.spectral - s2.green_kubo) /
                 std::max({std::abs(s2.spectral), std::abs(s2.green_kubo), 1e-9});
  sv.threshold = 1e-6;
  sv.pass = sv.statistic <= sv.threshold;
  sv.note = "sigma2 " + fmt_double(s2.spectral);
  verdicts.push_back(sv);

  out.write_verdicts(verdicts);
  const bool ok = sv.pass;  // the scan verdict reports, doesn't gate
  return {ok ? 0 : 1, verdicts, out.files};
}

// ---------------------------------------------------------------------------
// Z-extension experiments
// ---------------------------------------------------------------------------

std::vector<int> best_window(const GibbsMarkov& g, int half) {
  // most probable word of length 2*half+1 by greedy extension from the
  // most probable state (deterministic tie-break toward lower index)
  int s0 = 0;
  for (int s = 1; s < g.alphabet(); ++s)
    if (g.stationary[s] > g.stationary[s0]) s0 = s;
  std::vector<int> w{s0};
  for (int i = 0; i < 2 * half; ++i) {
    const int prev = w.back();
    int best = -1;
    for (int s = 0; s < g.alphabet(); ++s)
      if (g.spec.allowed(prev, s) && (best < 0 || g.pi(prev, s) > g.pi(prev, best)))
        best = s;
    w.push_back(best);
  }
  return w;
}

RunResult run_zext_llt(const Manifest& m) {
  Outputs out(m);
  const BuiltModel model = model_for(m);
  if (!model.has_step) throw std::invalid_argument("zext-llt: model needs a step function");
  if (m.n_list.empty()) throw std::invalid_argument("manifest.n_list: required");

  const auto rows = llt_lattice_check(model.gibbs, model.step, m.n_list);
  const double sigma = std::sqrt(sigma2_step(model.gibbs, model.step));

  const std::vector<int> w = best_window(model.gibbs, 1);
  const CylinderWord A = CylinderWord::make(2, w);
  const double nuA = word_measure(model.gibbs, w);

  std::ostringstream csv;
  csv << out.header() << "n,p_zero,normalized,cyl_ratio\n";
  double last_ratio = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    double ratio = std::numeric_limits<double>::quiet_NaN();
    if (!r.structurally_zero) {
      const double p = exact_return_probability(model.gibbs, model.step, A, w, r.n);
      ratio = p * sigma * std::sqrt(2.0 * 3.1415926535897932385 * static_cast<double>(r.n)) /
              (nuA * nuA);
      last_ratio = ratio;
    }
    csv << r.n << "," << fmt_double(r.p_zero) << "," << fmt_double(r.normalized)
        << "," << fmt_double(ratio) << "\n";
  }
  out.write("llt.csv", csv.str());

  Verdict v;
  v.name = "p3_cylinder_ratio";
  v.statistic = last_ratio;
  v.n = rows.empty() ? 0 : static_cast<std::uint64_t>(rows.back().n);
  v.threshold = 0.05;
  v.pass = std::abs(last_ratio - 1.0) <= v.threshold;
  std::vector<Verdict> verdicts{v};
  out.write_verdicts(verdicts);
  return {v.pass ? 0 : 1, verdicts, out.files};
}

std::string experiment_csv(const Outputs& out, const zext::ExperimentTable& table) {
  std::ostringstream csv;
  csv << out.header() << "sample_index,k,tau,censored,cyl_prob\n";
  for (const auto& r : table.rows)
    csv << r.sample_index << "," << r.k << "," << r.tau << ","
        << (r.censored ? 1 : 0) << "," << fmt_double(r.cyl_prob) << "\n";
  return csv.str();
}

// Distribution verdict for nu(C_k) sqrt(tau) vs the scaled E/|N| law with a
// one-parameter median scale fit; KS restricted to the uncensored range
// below T* = s_fit * q90, counting censored samples as mass above their
// censor bound (exact below T* up to the reported ambiguous fraction).
Verdict shape_verdict(const zext::ExperimentTable& table, std::size_t ki,
                      std::size_t n_samples, std::uint64_t cap, double sigma_phi) {
  std::vector<double> x_unc;
  std::vector<double> bounds;  // censor bounds of censored samples
  const zext::ExperimentRow* rows = table.rows.data() + ki * n_samples;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto& r = rows[i];
    const double b = r.cyl_prob * std::sqrt(static_cast<double>(cap));
    if (r.censored) bounds.push_back(b);
    else x_unc.push_back(r.cyl_prob * std::sqrt(static_cast<double>(r.tau)));
  }
  Verdict v;
  v.name = "zext_tau_shape_k" + std::to_string(table.k_list[ki]);
  v.n = n_samples;
  v.threshold = 0.08;
  if (x_unc.size() < 10 || bounds.size() >= x_unc.size()) {
    v.pass = false;
    v.note = "insufficient uncensored samples";
    return v;
  }
  // median over all samples; censored rank above the cap image
  std::vector<double> all = x_unc;
  for (double b : bounds) all.push_back(std::numeric_limits<double>::infinity());
  std::sort(all.begin(), all.end());
  const double med_emp = median_sorted(all);
  const ReferenceLaw base = ReferenceLaw::exp_over_abs_normal(1.0);
  const double s_fit = med_emp / quantile(base, 0.5);
  const ReferenceLaw fitted = ReferenceLaw::exp_over_abs_normal(s_fit);

  const double t_star = s_fit * quantile(base, 0.90);
  std::size_t ambiguous = 0;
  for (double b : bounds)
    if (b <= t_star) ++ambiguous;

  std::vector<double> trimmed;
  for (double x : x_unc)
    if (x < t_star) trimmed.push_back(x);
  const std::size_t n_total = n_samples;
  const auto emp = EmpiricalDistribution::from_censored(
      trimmed, n_total - trimmed.size(), t_star);
  v.statistic = ks_distance(emp, fitted);
  v.pass = v.statistic <= v.threshold;
  v.note = "fitted scale " + fmt_double(s_fit) + "; sigma_phi/sqrt(pi) " +
           fmt_double(sigma_phi / 1.7724538509055160273) + "; sigma_phi " +
           fmt_double(sigma_phi) + "; ambiguous censored fraction " +
           fmt_double(static_cast<double>(ambiguous) / static_cast<double>(n_total));
  return v;
}

RunResult run_zext_tau(const Manifest& m, zext::ReturnKind kind) {
  Outputs out(m);
  const BuiltModel model = model_for(m);
  if (!model.has_step) throw std::invalid_argument("zext-tau: model needs a step function");
  if (m.k_list.empty()) throw std::invalid_argument("manifest.k_list: required");
  const auto caps = caps_for(m, model.name);

  const SpectralCurve scan = nonarithmeticity_scan(model.gibbs, model.step, 256);
  auto table = zext::run_tau_experiment(model.gibbs, model.step, m.k_list,
                                        m.n_samples, caps, m.seed, kind);
  table.nonarithmetic_warning = !scan.nonarithmetic;
  out.write("samples.csv", experiment_csv(out, table));

  std::vector<Verdict> verdicts;
  if (kind == zext::ReturnKind::TauEpsilon) {
    const double sigma_phi = std::sqrt(scan.sigma2_phi);
    for (std::size_t ki = 0; ki < m.k_list.size(); ++ki) {
      Verdict cf;
      cf.name = "censor_fraction_k" + std::to_string(m.k_list[ki]);
      cf.statistic = table.censor_fraction[ki];
      cf.n = m.n_samples;
      cf.threshold = 0.5;
      cf.pass = cf.statistic < cf.threshold;
      verdicts.push_back(cf);
      verdicts.push_back(shape_verdict(table, ki, m.n_samples,
                                       caps[caps.size() == 1 ? 0 : ki], sigma_phi));
    }
  } else {
    // Hirata: nu(C_k) R_k against Exp(1), plus the Kac mean
    for (std::size_t ki = 0; ki < m.k_list.size(); ++ki) {
      std::vector<double> scaled;
      double mean = 0.0;
      const zext::ExperimentRow* rows = table.rows.data() + ki * m.n_samples;
      for (std::size_t i = 0; i < m.n_samples; ++i) {
        if (rows[i].censored) continue;
        scaled.push_back(rows[i].cyl_prob * static_cast<double>(rows[i].tau));
        mean += scaled.back();
      }
      Verdict ks;
      ks.name = "hirata_ks_vs_exp_k" + std::to_string(m.k_list[ki]);
      ks.statistic = ks_distance(EmpiricalDistribution::from_samples(scaled),
                                 ReferenceLaw::exponential());
      ks.n = scaled.size();
      ks.threshold = 0.05;
      ks.pass = ks.statistic <= ks.threshold;
      ks.note = "kac mean " + fmt_double(mean / static_cast<double>(scaled.size()));
      verdicts.push_back(ks);
    }
  }
  if (table.nonarithmetic_warning) {
    Verdict w;
    w.name = "nonarithmeticity_warning";
    w.statistic = 1.0;
    w.pass = kind == zext::ReturnKind::Hirata;  // tau needs the hypothesis
    w.note = "model failed the non-arithmeticity scan";
    verdicts.push_back(w);
  }
  out.write_verdicts(verdicts);
  bool ok = true;
  for (const auto& v : verdicts) ok = ok && v.pass;
  return {ok ? 0 : 1, verdicts, out.files};
}

RunResult run_zext_exponent(const Manifest& m) {
  Outputs out(m);
  const BuiltModel model = model_for(m);
  if (!model.has_step) throw std::invalid_argument("zext-exponent: model needs a step");
  if (m.k_list.size() < 3) throw std::invalid_argument("manifest.k_list: need >= 3 radii");
  const auto caps = caps_for(m, model.name);

  const auto table = zext::run_tau_experiment(model.gibbs, model.step, m.k_list,
                                              m.n_samples, caps, m.seed,
                                              zext::ReturnKind::TauEpsilon);
  std::ostringstream csv;
  csv << out.header() << "k,median_tau,censor_fraction\n";
  std::vector<double> xs, ys;
  for (std::size_t ki = 0; ki < m.k_list.size(); ++ki) {
    std::vector<double> taus;
    const zext::ExperimentRow* rows = table.rows.data() + ki * m.n_samples;
    for (std::size_t i = 0; i < m.n_samples; ++i)
      taus.push_back(static_cast<double>(rows[i].tau));
    const double med = median_of(taus);
    csv << m.k_list[ki] << "," << fmt_double(med) << ","
        << fmt_double(table.censor_fraction[ki]) << "\n";
    xs.push_back(static_cast<double>(m.k_list[ki]));
    ys.push_back(std::log(med));
  }
  out.write("exponent.csv", csv.str());

  const RegressionResult reg = exponent_regression(xs, ys);
  const double target = 2.0 * model.gibbs.dimension;  // 2d = 4 h_nu
  Verdict v;
  v.name = "zext_exponent_slope_over_2d";
  v.statistic = reg.slope / target;
  v.threshold = 0.25;
  v.n = m.k_list.size();
  v.pass = std::abs(v.statistic - 1.0) <= v.threshold;
  v.note = "slope " + fmt_double(reg.slope) + " target " + fmt_double(target);
  std::vector<Verdict> verdicts{v};
  out.write_verdicts(verdicts);
  return {v.pass ? 0 : 1, verdicts, out.files};
}

// ---------------------------------------------------------------------------
// limit-law verification
// ---------------------------------------------------------------------------

RunResult run_limits_verify(const Manifest& m) {
  Outputs out(m);
  std::vector<Verdict> verdicts;

  {
    Verdict v;
    v.name = "laplace_inverse_normal_sq";
    v.statistic = laplace_check_inverse_normal_sq({0.0, 0.5, 1.0, 2.0, 4.0});
    v.threshold = 1e-8;
    v.n = 5;
    v.pass = v.statistic <= v.threshold;
    verdicts.push_back(v);
  }
  {
    RngStream rng(m.seed, 1);
    double worst_se = 0.0;
    Verdict v;
    v.name = "laplace_w_transform";
    v.statistic = laplace_check_w(1.0, {0.25, 1.0, 4.0}, rng, 10000000, &worst_se);
    v.threshold = 3.0;  // measured in MC standard errors
    v.n = 10000000;
    v.pass = worst_se <= v.threshold;
    v.note = "max deviation " + fmt_double(v.statistic) + " (" + fmt_double(worst_se) +
             " std errors)";
    v.statistic = worst_se;
    verdicts.push_back(v);
  }
  {
    Verdict v;
    v.name = "integral_equation_residual";
    const double beta = 1.0;
    v.statistic = integral_equation_residual(
        beta, integral_equation_solution_scale(beta), {0.25, 0.5, 1.0, 2.0, 4.0});
    v.threshold = 1e-6;
    v.n = 5;
    v.pass = v.statistic <= v.threshold;
    verdicts.push_back(v);

    Verdict neg;
    neg.name = "integral_equation_negative_control";
    neg.statistic = integral_equation_residual(
        beta, 2.0 * integral_equation_solution_scale(beta), {1.0});
    neg.threshold = 1e-2;
    neg.n = 1;
    neg.pass = neg.statistic > neg.threshold;
    neg.note = "wrong scale must be rejected";
    verdicts.push_back(neg);
  }
  {
    // Monte Carlo self-consistency of every reference law
    const ReferenceLaw laws[] = {
        ReferenceLaw::exp_over_abs_normal(1.0), ReferenceLaw::inverse_normal_squared(),
        ReferenceLaw::exponential(), ReferenceLaw::gaussian(2.0)};
    const char* names[] = {"exp_over_abs_normal", "inverse_normal_squared",
                           "exponential", "gaussian"};
    for (int li = 0; li < 4; ++li) {
      RngStream rng(m.seed, 100 + li);
      std::vector<double> s(100000);
      for (auto& x : s) x = sample(laws[li], rng);
      Verdict v;
      v.name = std::string("self_consistency_") + names[li];
      v.statistic = ks_distance(EmpiricalDistribution::from_samples(s), laws[li]);
      v.n = s.size();
      v.threshold = ks_threshold_99(s.size());
      v.pass = v.statistic <= v.threshold;
      verdicts.push_back(v);
    }
  }
  out.write_verdicts(verdicts);
  bool ok = true;
  for (const auto& v : verdicts) ok = ok && v.pass;
  return {ok ? 0 : 1, verdicts, out.files};
}

}  // namespace

std::vector<std::string> known_kinds() {
  return {"toy-tau",     "toy-exponent", "toy-rn",        "sft-build",
          "sft-spectral", "zext-llt",     "zext-tau",      "zext-exponent",
          "hirata",      "limits-verify"};
}

RunResult run(const Manifest& manifest) {
  const std::string& k = manifest.kind;
  if (k == "toy-tau") return run_toy_tau(manifest);
  if (k == "toy-exponent") return run_toy_exponent(manifest);
  if (k == "toy-rn") return run_toy_rn(manifest);
  if (k == "sft-build") return run_sft_build(manifest);
  if (k == "sft-spectral") return run_sft_spectral(manifest);
  if (k == "zext-llt") return run_zext_llt(manifest);
  if (k == "zext-tau") return run_zext_tau(manifest, zext::ReturnKind::TauEpsilon);
  if (k == "zext-exponent") return run_zext_exponent(manifest);
  if (k == "hirata") return run_zext_tau(manifest, zext::ReturnKind::Hirata);
  if (k == "limits-verify") return run_limits_verify(manifest);
  throw std::invalid_argument("manifest.kind: unknown experiment '" + k + "'");
}

RunResult report(const std::vector<std::string>& verdict_files,
                 const std::string& out_dir) {
  RunResult res;
  json all = json::array();
  std::size_t pass = 0, fail = 0;
  for (const auto& path : verdict_files) {
    json j = json::parse(read_text_file(path));
    for (const auto& v : j["verdicts"]) {
      Verdict rec;
      rec.name = v["name"].get<std::string>();
      rec.pass = v["verdict"].get<std::string>() == "pass";
      rec.statistic = v.value("statistic", 0.0);
      rec.threshold = v.value("threshold", 0.0);
      (rec.pass ? pass : fail) += 1;
      res.verdicts.push_back(rec);
      json e = v;
      e["source"] = path;
      all.push_back(e);
    }
  }
  json summary;
  summary["total"] = pass + fail;
  summary["pass"] = pass;
  summary["fail"] = fail;
  summary["verdicts"] = all;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/report.json", summary.dump(2) + "\n");
    res.files_written.push_back(out_dir + "/report.json");
  }
  res.exit_code = fail == 0 ? 0 : 1;
  return res;
}

}  // namespace runner
}  // namespace zrec
