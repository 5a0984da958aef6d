#include "zrec/presets.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace zrec {

namespace {

using nlohmann::json;

WordTable dense_table(int depth, int alphabet, const std::vector<double>& vals) {
  WordTable t;
  t.depth = depth;
  t.values = vals;
  std::size_t full = 1;
  for (int i = 0; i < depth; ++i) full *= static_cast<std::size_t>(alphabet);
  if (vals.size() != full) throw std::invalid_argument("dense_table: size mismatch");
  return t;
}

ModelDefinition bernoulli_model(const std::string& name,
                                const std::vector<double>& p,
                                const WordTable& step) {
  ModelDefinition def;
  def.name = name;
  const int a = static_cast<int>(p.size());
  def.spec = SubshiftSpec::full_shift(a);
  std::vector<double> pot(static_cast<std::size_t>(a) * a, 0.0);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) pot[static_cast<std::size_t>(i) * a + j] = std::log(p[j]);
  def.potential = dense_table(2, a, pot);
  def.step = step;
  def.has_step = true;
  return def;
}

}  // namespace

namespace {

// Extend a word table to a deeper one: the value of a long word is the value
// of its prefix (locally constant functions are constant on finer cylinders).
WordTable lift_table(const WordTable& t, int depth, int alphabet) {
  if (t.depth == depth) return t;
  if (t.depth > depth) throw std::invalid_argument("lift_table: cannot shrink depth");
  std::size_t full = 1;
  for (int i = 0; i < depth; ++i) full *= static_cast<std::size_t>(alphabet);
  std::size_t suffix = 1;
  for (int i = 0; i < depth - t.depth; ++i) suffix *= static_cast<std::size_t>(alphabet);
  WordTable out;
  out.depth = depth;
  out.values.resize(full);
  for (std::size_t c = 0; c < full; ++c) {
    const std::size_t prefix = c / suffix;
    out.values[c] = t.values.size() == 1 ? t.values[0] : t.values[prefix];
  }
  return out;
}

}  // namespace

BuiltModel build_model(const ModelDefinition& def) {
  // bookkeeping depth covers both tables
  const int m0 = std::max({def.potential.depth, def.has_step ? def.step.depth : 1, 2});
  const int a = def.spec.alphabet_size;
  const WordTable pot_m0 = lift_table(def.potential, m0, a);
  WordTable step_m0;
  if (def.has_step) step_m0 = lift_table(def.step, m0, a);
  const RecodedModel rec =
      recode_to_depth2(def.spec, pot_m0, def.has_step ? &step_m0 : nullptr);
  BuiltModel m;
  m.name = def.name;
  m.gibbs = build_gibbs(rec.spec, rec.potential);
  m.gibbs.block_length = rec.block_length;
  m.gibbs.state_labels = rec.state_labels;
  if (def.has_step) {
    m.step = make_step_function(m.gibbs, rec.step_values);
    m.has_step = true;
  }
  return m;
}

ModelDefinition get_preset(const std::string& name) {
  if (name == "uniform-2shift") {
    WordTable step;
    step.depth = 1;
    step.values = {1.0, -1.0};
    return bernoulli_model(name, {0.5, 0.5}, step);
  }
  if (name == "lazy-walk" || name == "lazy-walk-q25") {
    const double q = name == "lazy-walk" ? 0.05 : 0.25;
    WordTable step;
    step.depth = 1;
    step.values = {1.0, -1.0, 0.0};
    return bernoulli_model(name, {q, q, 1.0 - 2.0 * q}, step);
  }
  if (name == "golden-mean") {
    ModelDefinition def;
    def.name = name;
    def.spec = SubshiftSpec::make(2, {1, 1, 1, 0});
    // maximal-entropy (Parry) measure: zero potential at depth 3 so the
    // depth-3 step below shares the recoded block alphabet
    WordTable pot;
    pot.depth = 3;
    pot.values.assign(8, 0.0);
    def.potential = pot;
    // centred integer step on 3-words; non-arithmetic, not a coboundary
    // (words over {a=0, b=1}; disallowed words carry zeros, never read)
    WordTable step;
    step.depth = 3;
    step.values.assign(8, 0.0);
    const int A = 2;
    step.values[WordTable::code({0, 0, 0}, A)] = 1.0;
    step.values[WordTable::code({0, 0, 1}, A)] = -1.0;
    step.values[WordTable::code({0, 1, 0}, A)] = 0.0;
    step.values[WordTable::code({1, 0, 0}, A)] = 0.0;
    step.values[WordTable::code({1, 0, 1}, A)] = -1.0;
    def.step = step;
    def.has_step = true;
    return def;
  }
  if (name == "bernoulli-37") {
    WordTable step;
    step.depth = 2;
    step.values = {7.0, -3.0, 0.0, 0.0};  // aa, ab, ba, bb
    return bernoulli_model(name, {0.3, 0.7}, step);
  }
  if (name == "bernoulli-91-arith") {
    WordTable step;
    step.depth = 1;
    step.values = {1.0, -9.0};
    return bernoulli_model(name, {0.9, 0.1}, step);
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"uniform-2shift", "lazy-walk", "lazy-walk-q25",
          "golden-mean",    "bernoulli-37", "bernoulli-91-arith"};
}

std::uint64_t recommended_tau_cap(const std::string& preset_name, int k) {
  if (k < 1) throw std::invalid_argument("recommended_tau_cap: k must be >= 1");
  if (preset_name == "lazy-walk") {
    // median log tau grows like 4 h k; one log-sd of headroom keeps the
    // median uncensored while bounding the expected work per sample
    static const std::uint64_t caps[] = {
        0,        1u << 14, 1u << 16, 1u << 18, 1u << 20, 1u << 22,
        1u << 24, 1u << 26, 1u << 27, 1u << 28, 1u << 29};
    if (k <= 10) return caps[k];
    return 1ull << 30;
  }
  const int shift = std::min(12 + 2 * k, 34);
  return 1ull << shift;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

WordTable table_from_json(const json& j, int alphabet, const SubshiftSpec& spec,
                          const std::string& path) {
  if (!j.contains("depth") || !j["depth"].is_number_integer())
    throw std::invalid_argument(path + ".depth: required integer");
  const int depth = j["depth"].get<int>();
  if (depth < 1 || depth > 12)
    throw std::invalid_argument(path + ".depth: must be in 1..12");
  std::size_t full = 1;
  for (int i = 0; i < depth; ++i) full *= static_cast<std::size_t>(alphabet);
  WordTable t;
  t.depth = depth;
  t.values.assign(full, std::numeric_limits<double>::quiet_NaN());
  if (!j.contains("entries") || !j["entries"].is_array())
    throw std::invalid_argument(path + ".entries: required array");
  std::size_t idx = 0;
  for (const auto& e : j["entries"]) {
    const std::string epath = path + ".entries[" + std::to_string(idx++) + "]";
    if (!e.contains("word") || !e["word"].is_array())
      throw std::invalid_argument(epath + ".word: required array of symbols");
    std::vector<int> word;
    for (const auto& s : e["word"]) {
      if (!s.is_number_integer()) throw std::invalid_argument(epath + ".word: integer symbols");
      word.push_back(s.get<int>());
    }
    if (static_cast<int>(word.size()) != depth)
      throw std::invalid_argument(epath + ".word: length must equal depth");
    for (int s : word)
      if (s < 0 || s >= alphabet)
        throw std::invalid_argument(epath + ".word: symbol out of alphabet range");
    if (!e.contains("value") || !e["value"].is_number())
      throw std::invalid_argument(epath + ".value: required number");
    t.values[WordTable::code(word, alphabet)] = e["value"].get<double>();
  }
  // coverage check: every transition-allowed word needs a value
  std::vector<int> word(depth, 0);
  while (true) {
    bool allowed = true;
    for (int i = 0; i + 1 < depth; ++i)
      if (!spec.allowed(word[i], word[i + 1])) { allowed = false; break; }
    const std::size_t code = WordTable::code(word, alphabet);
    if (allowed && std::isnan(t.values[code])) {
      std::string w;
      for (int s : word) w += std::to_string(s);
      throw std::invalid_argument(path + ": missing entry for allowed word " + w);
    }
    if (!allowed) t.values[code] = 0.0;
    int pos = depth - 1;
    while (pos >= 0 && ++word[pos] == alphabet) word[pos--] = 0;
    if (pos < 0) break;
  }
  return t;
}

}  // namespace

ModelDefinition model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("model JSON parse error: ") + e.what());
  }
  if (!j.contains("alphabet") || !j["alphabet"].is_number_integer())
    throw std::invalid_argument("model.alphabet: required integer");
  const int a = j["alphabet"].get<int>();
  if (a < 2 || a > 64) throw std::invalid_argument("model.alphabet: must be in 2..64");
  if (!j.contains("transition") || !j["transition"].is_array() ||
      static_cast<int>(j["transition"].size()) != a)
    throw std::invalid_argument("model.transition: required array of alphabet rows");
  std::vector<std::uint8_t> trans;
  trans.reserve(static_cast<std::size_t>(a) * a);
  for (int i = 0; i < a; ++i) {
    const auto& row = j["transition"][i];
    if (!row.is_array() || static_cast<int>(row.size()) != a)
      throw std::invalid_argument("model.transition[" + std::to_string(i) +
                                  "]: row of alphabet 0/1 entries");
    for (int c = 0; c < a; ++c) {
      const auto& v = row[c];
      if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
        throw std::invalid_argument("model.transition[" + std::to_string(i) + "][" +
                                    std::to_string(c) + "]: entries must be 0 or 1");
      trans.push_back(static_cast<std::uint8_t>(v.get<int>()));
    }
  }
  ModelDefinition def;
  def.name = j.value("name", std::string("inline"));
  def.spec = SubshiftSpec::make(a, std::move(trans));
  if (!j.contains("potential"))
    throw std::invalid_argument("model.potential: required");
  def.potential = table_from_json(j["potential"], a, def.spec, "model.potential");
  if (j.contains("step")) {
    def.step = table_from_json(j["step"], a, def.spec, "model.step");
    def.has_step = true;
  }
  return def;
}

std::string model_to_json_text(const ModelDefinition& def) {
  json j;
  j["name"] = def.name;
  const int a = def.spec.alphabet_size;
  j["alphabet"] = a;
  json trans = json::array();
  for (int i = 0; i < a; ++i) {
    json row = json::array();
    for (int c = 0; c < a; ++c) row.push_back(static_cast<int>(def.spec.allowed(i, c)));
    trans.push_back(row);
  }
  j["transition"] = trans;
  const auto dump_table = [&](const WordTable& t) {
    json tj;
    tj["depth"] = t.depth;
    json entries = json::array();
    std::vector<int> word(t.depth, 0);
    while (true) {
      bool allowed = true;
      for (int i = 0; i + 1 < t.depth; ++i)
        if (!def.spec.allowed(word[i], word[i + 1])) { allowed = false; break; }
      if (allowed) {
        json e;
        e["word"] = word;
        e["value"] = t.values.size() == 1 ? t.values[0]
                                          : t.values[WordTable::code(word, a)];
        entries.push_back(e);
      }
      int pos = t.depth - 1;
      while (pos >= 0 && ++word[pos] == a) word[pos--] = 0;
      if (pos < 0) break;
    }
    tj["entries"] = entries;
    return tj;
  };
  j["potential"] = dump_table(def.potential);
  if (def.has_step) j["step"] = dump_table(def.step);
  return j.dump(2);
}

}  // namespace zrec
