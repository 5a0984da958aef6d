#include "zrec/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zrec {

namespace {

constexpr double kEigenTol = 1e-14;
constexpr int kEigenBudget = 1000000;

void check_square(int a, std::size_t n) {
  if (a <= 0) throw std::invalid_argument("SubshiftSpec: alphabet_size must be positive");
  if (n != static_cast<std::size_t>(a) * static_cast<std::size_t>(a))
    throw std::invalid_argument("SubshiftSpec: transition matrix must be alphabet x alphabet");
}

// Smallest n0 with M^{n0} entrywise positive, or 0 if none up to the
// Wielandt bound (A-1)^2 + 1.
int primitivity_index(int a, const std::vector<std::uint8_t>& m) {
  const int bound = (a - 1) * (a - 1) + 1;
  std::vector<std::uint8_t> cur = m, nxt(m.size());
  for (int e = 1; e <= bound; ++e) {
    bool all = true;
    for (std::uint8_t v : cur)
      if (!v) { all = false; break; }
    if (all) return e;
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) {
        std::uint8_t acc = 0;
        for (int k = 0; k < a; ++k)
          if (cur[i * a + k] && m[k * a + j]) { acc = 1; break; }
        nxt[i * a + j] = acc;
      }
    cur.swap(nxt);
  }
  return 0;
}

}  // namespace

SubshiftSpec SubshiftSpec::full_shift(int alphabet_size) {
  return make(alphabet_size,
              std::vector<std::uint8_t>(
                  static_cast<std::size_t>(alphabet_size) * alphabet_size, 1));
}

SubshiftSpec SubshiftSpec::make(int alphabet_size,
                                std::vector<std::uint8_t> transition,
                                int primitivity_exponent) {
  check_square(alphabet_size, transition.size());
  const int a = alphabet_size;
  for (int i = 0; i < a; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < a; ++j) {
      row |= transition[i * a + j] != 0;
      col |= transition[j * a + i] != 0;
    }
    if (!row || !col)
      throw std::invalid_argument("SubshiftSpec: every row and column needs at least one 1");
  }
  const int n0 = primitivity_index(a, transition);
  if (n0 == 0)
    throw std::invalid_argument("SubshiftSpec: transition matrix is not primitive");
  if (primitivity_exponent > 0) {
    // Caller-provided witness must itself yield a positive power.
    if (primitivity_exponent < n0)
      throw std::invalid_argument("SubshiftSpec: claimed primitivity exponent too small");
  }
  SubshiftSpec s;
  s.alphabet_size = a;
  s.transition = std::move(transition);
  s.primitivity_exponent = primitivity_exponent > 0 ? primitivity_exponent : n0;
  return s;
}

std::size_t WordTable::code(const std::vector<int>& word, int alphabet) {
  std::size_t c = 0;
  for (int s : word) {
    if (s < 0 || s >= alphabet) throw std::invalid_argument("word symbol out of range");
    c = c * alphabet + static_cast<std::size_t>(s);
  }
  return c;
}

double WordTable::at(const std::vector<int>& word, int alphabet) const {
  if (static_cast<int>(word.size()) != depth)
    throw std::invalid_argument("WordTable::at: word length != depth");
  return values[code(word, alphabet)];
}

Potential Potential::constant(double value, int depth) {
  Potential p;
  p.table.depth = depth;
  p.table.values.assign(1, value);  // resized on use; see lift below
  return p;
}

namespace {

// Dense depth-d table lookup that tolerates the compact constant form.
double table_value(const WordTable& t, std::size_t code, std::size_t full_size) {
  if (t.values.size() == 1) return t.values[0];
  if (t.values.size() != full_size)
    throw std::invalid_argument("WordTable: value vector has wrong size");
  return t.values[code];
}

struct Eigen {
  std::vector<double> right, left;
  double lambda;
};

// Power iteration for the Perron pair of the primitive nonnegative matrix L.
Eigen perron(const std::vector<double>& L, int a) {
  Eigen e;
  e.right.assign(a, 1.0);
  e.left.assign(a, 1.0);
  std::vector<double> tmp(a);
  double lam = 0.0, lam_prev = -1.0;
  int it = 0;
  for (; it < kEigenBudget; ++it) {
    // right
    for (int i = 0; i < a; ++i) {
      double s = 0.0;
      for (int j = 0; j < a; ++j) s += L[i * a + j] * e.right[j];
      tmp[i] = s;
    }
    double norm = 0.0;
    for (double v : tmp) norm += v;
    lam = norm;  // since sum(right) == 1 after normalisation
    for (int i = 0; i < a; ++i) e.right[i] = tmp[i] / norm;
    if (std::abs(lam - lam_prev) <= kEigenTol * std::abs(lam)) break;
    lam_prev = lam;
  }
  if (it == kEigenBudget)
    throw std::runtime_error("build_gibbs: Perron iteration did not converge");
  // polish lambda with a Rayleigh-style quotient and iterate the left vector
  for (it = 0; it < kEigenBudget; ++it) {
    for (int j = 0; j < a; ++j) {
      double s = 0.0;
      for (int i = 0; i < a; ++i) s += e.left[i] * L[i * a + j];
      tmp[j] = s;
    }
    double norm = 0.0;
    for (double v : tmp) norm += v;
    bool done = true;
    for (int j = 0; j < a; ++j) {
      const double nv = tmp[j] / norm;
      if (std::abs(nv - e.left[j]) > kEigenTol) done = false;
      e.left[j] = nv;
    }
    if (done) break;
  }
  if (it == kEigenBudget)
    throw std::runtime_error("build_gibbs: left Perron iteration did not converge");
  e.lambda = lam;
  return e;
}

}  // namespace

GibbsMarkov build_gibbs(const SubshiftSpec& spec, const Potential& pot) {
  const int a = spec.alphabet_size;
  const std::size_t aa = static_cast<std::size_t>(a) * a;
  if (pot.table.depth < 1 || pot.table.depth > 2)
    throw std::invalid_argument(
        "build_gibbs: potential depth must be 1 or 2 (recode deeper tables first)");

  // L(a,b) = M(a,b) e^{h(a,b)}, lifting depth-1 h via h(a,b) = h(a).
  std::vector<double> L(aa, 0.0);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      if (spec.allowed(i, j)) {
        const std::size_t code = pot.table.depth == 2
                                     ? static_cast<std::size_t>(i) * a + j
                                     : static_cast<std::size_t>(i);
        const std::size_t full = pot.table.depth == 2 ? aa : static_cast<std::size_t>(a);
        L[i * a + j] = std::exp(table_value(pot.table, code, full));
      }

  const Eigen e = perron(L, a);

  GibbsMarkov g;
  g.spec = spec;
  g.perron_value = e.lambda;
  g.transitions.assign(aa, 0.0);
  g.normalized_potential.assign(aa, -std::numeric_limits<double>::infinity());
  g.stationary.assign(a, 0.0);

  for (int i = 0; i < a; ++i) {
    double row = 0.0;
    for (int j = 0; j < a; ++j) {
      const double pij = L[i * a + j] * e.right[j] / (e.lambda * e.right[i]);
      g.transitions[i * a + j] = pij;
      row += pij;
    }
    // exact stochasticity: renormalise the residual eigen error away
    for (int j = 0; j < a; ++j) {
      g.transitions[i * a + j] /= row;
      if (g.transitions[i * a + j] > 0.0)
        g.normalized_potential[i * a + j] = std::log(g.transitions[i * a + j]);
    }
  }

  double dot = 0.0;
  for (int i = 0; i < a; ++i) dot += e.left[i] * e.right[i];
  for (int i = 0; i < a; ++i) g.stationary[i] = e.left[i] * e.right[i] / dot;
  // one stationarity sweep to push p pi = p to machine precision
  for (int sweep = 0; sweep < 64; ++sweep) {
    std::vector<double> np(a, 0.0);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) np[j] += g.stationary[i] * g.transitions[i * a + j];
    double norm = 0.0, delta = 0.0;
    for (double v : np) norm += v;
    for (int i = 0; i < a; ++i) {
      np[i] /= norm;
      delta = std::max(delta, std::abs(np[i] - g.stationary[i]));
      g.stationary[i] = np[i];
    }
    if (delta < 1e-16) break;
  }

  double h = 0.0;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      const double pij = g.transitions[i * a + j];
      if (pij > 0.0) h -= g.stationary[i] * pij * std::log(pij);
    }
  g.entropy = h;
  g.dimension = 2.0 * h;
  g.state_labels.resize(a);
  for (int i = 0; i < a; ++i) g.state_labels[i] = {i};
  return g;
}

std::vector<double> GibbsMarkov::reversed_kernel() const {
  const int a = alphabet();
  std::vector<double> rev(static_cast<std::size_t>(a) * a, 0.0);
  for (int b = 0; b < a; ++b) {
    double row = 0.0;
    for (int s = 0; s < a; ++s) {
      rev[b * a + s] = stationary[s] * pi(s, b) / stationary[b];
      row += rev[b * a + s];
    }
    for (int s = 0; s < a; ++s) rev[b * a + s] /= row;
  }
  return rev;
}

RecodedModel recode_to_depth2(const SubshiftSpec& spec, const WordTable& potential,
                              const WordTable* step) {
  const int m0 = potential.depth;
  if (m0 < 1) throw std::invalid_argument("recode_to_depth2: potential depth must be >= 1");
  if (step && step->depth > m0)
    throw std::invalid_argument("recode_to_depth2: step depth exceeds potential depth");

  RecodedModel out;
  if (m0 <= 2) {
    out.spec = spec;
    out.potential.table = potential;
    if (step) { out.step_values = *step; out.has_step = true; }
    out.block_length = 1;
    out.state_labels.resize(spec.alphabet_size);
    for (int i = 0; i < spec.alphabet_size; ++i) out.state_labels[i] = {i};
    return out;
  }

  const int a = spec.alphabet_size;
  const int blk = m0 - 1;

  // Enumerate allowed (m0-1)-words; they become the block alphabet.
  std::vector<std::vector<int>> states;
  std::vector<int> word(blk, 0);
  const auto word_allowed = [&](const std::vector<int>& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!spec.allowed(w[i], w[i + 1])) return false;
    return true;
  };
  // odometer enumeration of all a^blk words
  while (true) {
    if (word_allowed(word)) states.push_back(word);
    int pos = blk - 1;
    while (pos >= 0 && ++word[pos] == a) word[pos--] = 0;
    if (pos < 0) break;
  }
  const int A2 = static_cast<int>(states.size());
  if (A2 == 0) throw std::invalid_argument("recode_to_depth2: no allowed words");

  std::vector<std::uint8_t> trans(static_cast<std::size_t>(A2) * A2, 0);
  std::vector<double> pot2(static_cast<std::size_t>(A2) * A2, 0.0);
  std::vector<double> step2;
  if (step) step2.assign(static_cast<std::size_t>(A2) * A2, 0.0);

  const std::size_t full_pot = [&] {
    std::size_t s = 1;
    for (int i = 0; i < m0; ++i) s *= a;
    return s;
  }();

  for (int u = 0; u < A2; ++u)
    for (int v = 0; v < A2; ++v) {
      // overlap: states[u][1..] == states[v][..blk-2]
      // overlap compatibility; the new adjacent pair lies inside states[v],
      // which is already an allowed word (blk >= 2 on this path)
      bool ok = true;
      for (int i = 0; i + 1 < blk; ++i)
        if (states[u][i + 1] != states[v][i]) { ok = false; break; }
      if (!ok) continue;
      trans[static_cast<std::size_t>(u) * A2 + v] = 1;
      // combined m0-word = states[u] + last symbol of states[v]
      std::vector<int> w = states[u];
      w.push_back(states[v][blk - 1]);
      pot2[static_cast<std::size_t>(u) * A2 + v] =
          table_value(potential, WordTable::code(w, a), full_pot);
      if (step) {
        std::vector<int> sw(w.begin(), w.begin() + step->depth);
        std::size_t full_step = 1;
        for (int i = 0; i < step->depth; ++i) full_step *= a;
        step2[static_cast<std::size_t>(u) * A2 + v] =
            table_value(*step, WordTable::code(sw, a), full_step);
      }
    }

  out.spec = SubshiftSpec::make(A2, std::move(trans));
  out.potential.table.depth = 2;
  out.potential.table.values = std::move(pot2);
  if (step) {
    out.step_values.depth = 2;
    out.step_values.values = std::move(step2);
    out.has_step = true;
  }
  out.block_length = blk;
  out.state_labels = std::move(states);
  return out;
}

double word_measure(const GibbsMarkov& g, const std::vector<int>& word) {
  if (word.empty()) throw std::invalid_argument("word_measure: empty word");
  const int a = g.alphabet();
  for (int s : word)
    if (s < 0 || s >= a) throw std::invalid_argument("word_measure: symbol out of range");
  double m = g.stationary[word[0]];
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!g.spec.allowed(word[i], word[i + 1]))
      throw std::invalid_argument("word_measure: word not allowed by transition matrix");
    m *= g.pi(word[i], word[i + 1]);
  }
  return m;
}

CylinderWord CylinderWord::make(int radius, std::vector<int> symbols) {
  if (radius < 1) throw std::invalid_argument("CylinderWord: radius must be >= 1");
  if (static_cast<int>(symbols.size()) != 2 * radius - 1)
    throw std::invalid_argument("CylinderWord: need 2k-1 symbols");
  CylinderWord w;
  w.radius = radius;
  w.symbols = std::move(symbols);
  return w;
}

double cylinder_measure(const GibbsMarkov& g, const CylinderWord& w) {
  return word_measure(g, w.symbols);
}

StepFunction make_step_function(const GibbsMarkov& g, const WordTable& values) {
  if (values.depth < 1 || values.depth > 2)
    throw std::invalid_argument("make_step_function: depth must be 1 or 2 post-recoding");
  const int a = g.alphabet();
  const std::size_t aa = static_cast<std::size_t>(a) * a;

  StepFunction f;
  f.depth = values.depth;
  f.edge_values.assign(aa, 0);
  double mean = 0.0;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      if (!g.spec.allowed(i, j)) continue;
      const std::size_t code = values.depth == 2 ? static_cast<std::size_t>(i) * a + j
                                                 : static_cast<std::size_t>(i);
      const std::size_t full = values.depth == 2 ? aa : static_cast<std::size_t>(a);
      const double v = table_value(values, code, full);
      const long long iv = std::llround(v);
      if (std::abs(v - static_cast<double>(iv)) > 1e-9)
        throw std::invalid_argument("make_step_function: values must be integers");
      f.edge_values[i * a + j] = iv;
      f.max_abs = std::max(f.max_abs, std::abs(iv));
      mean += g.stationary[i] * g.pi(i, j) * static_cast<double>(iv);
    }
  f.mean_residual = std::abs(mean);
  if (f.mean_residual > 1e-12)
    throw std::invalid_argument(
        "make_step_function: nonzero mean (residual " + std::to_string(mean) +
        "); integer-valued phi cannot be recentred");
  return f;
}

double green_kubo_sigma2(const GibbsMarkov& g, const std::vector<double>& edge_f) {
  const int a = g.alphabet();
  if (edge_f.size() != static_cast<std::size_t>(a) * a)
    throw std::invalid_argument("green_kubo_sigma2: edge table size mismatch");

  // centre
  double mean = 0.0;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      if (g.spec.allowed(i, j)) mean += g.stationary[i] * g.pi(i, j) * edge_f[i * a + j];

  double var = 0.0;
  std::vector<double> past(a, 0.0);    // G(b) = sum_a p(a) pi(a,b) f0(a,b)
  std::vector<double> future(a, 0.0);  // F(c) = sum_d pi(c,d) f0(c,d)
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      if (!g.spec.allowed(i, j)) continue;
      const double f0 = edge_f[i * a + j] - mean;
      var += g.stationary[i] * g.pi(i, j) * f0 * f0;
      past[j] += g.stationary[i] * g.pi(i, j) * f0;
      future[i] += g.pi(i, j) * f0;
    }

  // sum_{k>=1} Cov_k with Cov_k = G^T pi^{k-1} F, truncated geometrically.
  double sigma2 = var;
  std::vector<double> v = future, nv(a);
  const double scale = std::max(var, 1e-30);
  for (int k = 1; k <= 1000000; ++k) {
    double cov = 0.0;
    for (int b = 0; b < a; ++b) cov += past[b] * v[b];
    sigma2 += 2.0 * cov;
    if (std::abs(cov) < 1e-17 * scale && k > 8) break;
    for (int i = 0; i < a; ++i) {
      double s = 0.0;
      for (int j = 0; j < a; ++j) s += g.pi(i, j) * v[j];
      nv[i] = s;
    }
    v.swap(nv);
  }
  return std::max(sigma2, 0.0);
}

double sigma2_h(const GibbsMarkov& g) {
  const int a = g.alphabet();
  std::vector<double> f(static_cast<std::size_t>(a) * a, 0.0);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      if (g.spec.allowed(i, j)) f[i * a + j] = g.normalized_potential[i * a + j];
  return green_kubo_sigma2(g, f);
}

}  // namespace zrec
