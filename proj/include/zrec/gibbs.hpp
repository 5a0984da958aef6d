// Subshifts of finite type and their Gibbs-Markov measures.
//
// Potentials and step functions are locally constant with finite depth m0,
// which reduces the transfer operator to a finite matrix L(a,b) =
// M(a,b) e^{h(a,b)}.  Perron-Frobenius eigendata of L yield a stationary
// Markov chain (p, pi) whose cylinder masses realise the Gibbs measure with
// constant exactly 1:  log nu(C) = sum of the normalised potential log pi
// along the cylinder word.  Depths m0 >= 3 are handled by higher-block
// recoding to depth 2 first.
//
// Conventions: probabilities and entropy in natural log units; the metric on
// sequences is d(w,w') = e^{-m} with m the largest integer such that
// w_i = w'_i whenever |i| < m.  A CylinderWord of radius k therefore lists
// the 2k-1 symbols at indices -(k-1)..(k-1).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zrec {

struct SubshiftSpec {
  int alphabet_size = 0;
  std::vector<std::uint8_t> transition;  // row-major alphabet x alphabet, 0/1
  int primitivity_exponent = 0;          // smallest n0 with M^{n0} > 0

  std::uint8_t allowed(int a, int b) const {
    return transition[static_cast<std::size_t>(a) * alphabet_size + b];
  }

  static SubshiftSpec full_shift(int alphabet_size);
  // Validates shape, row/column support, and primitivity (finds n0; also
  // checks a caller-provided exponent).  Throws std::invalid_argument.
  static SubshiftSpec make(int alphabet_size, std::vector<std::uint8_t> transition,
                           int primitivity_exponent = 0);
};

// Real table on words of a fixed depth over the alphabet; entries for words
// not allowed by the transition matrix are ignored.  Word code is
// sum_j symbol_j * A^(depth-1-j) (most significant symbol first).
struct WordTable {
  int depth = 0;
  std::vector<double> values;  // size A^depth

  double at(const std::vector<int>& word, int alphabet) const;
  static std::size_t code(const std::vector<int>& word, int alphabet);
};

struct Potential {
  WordTable table;  // depth m0 >= 1

  static Potential constant(double value, int depth = 2);
};

struct GibbsMarkov;

struct StepFunction {
  int depth = 0;
  std::vector<long long> edge_values;  // row-major A x A, edge (a,b) -> value
  double mean_residual = 0.0;          // |int phi dnu| as computed (<= 1e-12)
  long long max_abs = 0;

  long long value(int a, int b, int alphabet) const {
    return edge_values[static_cast<std::size_t>(a) * alphabet + b];
  }
};

struct GibbsMarkov {
  SubshiftSpec spec;
  std::vector<double> stationary;   // p, size A
  std::vector<double> transitions;  // pi, row-major A x A (stochastic)
  double perron_value = 0.0;        // lambda of L
  double entropy = 0.0;             // h_nu, nats
  double dimension = 0.0;           // d = 2 h_nu
  std::vector<double> normalized_potential;  // log pi (A x A; -inf disallowed)
  // Higher-block bookkeeping: each chain state stands for block_length
  // consecutive symbols of the original subshift (1 when no recoding).
  int block_length = 1;
  std::vector<std::vector<int>> state_labels;  // original-symbol words

  int alphabet() const { return spec.alphabet_size; }
  double pi(int a, int b) const {
    return transitions[static_cast<std::size_t>(a) * alphabet() + b];
  }
  // Time-reversed kernel: probability that the predecessor of b is a.
  std::vector<double> reversed_kernel() const;
};

struct CylinderWord {
  int radius = 0;             // k >= 1
  std::vector<int> symbols;   // length 2k-1, indices -(k-1)..(k-1)

  static CylinderWord make(int radius, std::vector<int> symbols);
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Builds the Gibbs-Markov chain from a depth-<=2 potential.  Depth-1 tables
// are lifted to edges via h(a,b) = h(a).  Throws on non-primitive matrices
// and on eigensolver failure.
GibbsMarkov build_gibbs(const SubshiftSpec& spec, const Potential& pot);

struct RecodedModel {
  SubshiftSpec spec;                  // block alphabet
  Potential potential;                // depth 2 on block states
  WordTable step_values;              // depth 2 on block states (if step given)
  bool has_step = false;
  int block_length = 1;               // m0 - 1
  std::vector<std::vector<int>> state_labels;
};

// Higher-block recoding of a depth-m0 potential (and optional step table,
// depth <= m0) to depth 2.  Depth <= 2 input passes through unchanged.
RecodedModel recode_to_depth2(const SubshiftSpec& spec, const WordTable& potential,
                              const WordTable* step = nullptr);

// nu(C) = p(w_0) prod pi(w_i, w_{i+1}) over the cylinder word; the anchor
// index is immaterial by shift invariance.  Throws on disallowed words.
double cylinder_measure(const GibbsMarkov& g, const CylinderWord& w);
double word_measure(const GibbsMarkov& g, const std::vector<int>& word);

// Validates integrality and zero mean (|mean| <= 1e-12; integer-valued phi
// cannot be recentred, so a nonzero mean is an error carrying the residual).
StepFunction make_step_function(const GibbsMarkov& g, const WordTable& values);

// Asymptotic variance of the centred normalised potential (log pi + h_nu)
// under the chain; vanishes exactly for the measure of maximal entropy.
double sigma2_h(const GibbsMarkov& g);

// Green-Kubo asymptotic variance of a centred edge function f(a,b):
// Var(f) + 2 sum_{k>=1} Cov(f, f circ theta^k), truncated when the terms
// fall below 1e-17 of the accumulated value.
double green_kubo_sigma2(const GibbsMarkov& g, const std::vector<double>& edge_f);

}  // namespace zrec
