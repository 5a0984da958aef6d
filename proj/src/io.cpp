#include "zrec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zrec {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string Manifest::canonical_json() const {
  json j;
  j["kind"] = kind;
  j["preset"] = preset;
  j["model_json"] = model_json;
  j["seed"] = seed;
  j["version"] = version;
  j["k_list"] = k_list;
  j["eps_list"] = eps_list;
  j["n_list"] = n_list;
  j["n_samples"] = n_samples;
  j["step_caps"] = step_caps;
  j["grid_size"] = grid_size;
  j["dim"] = dim;
  j["eps"] = eps;
  j["mode"] = mode;
  j["rn_n"] = rn_n;
  return j.dump(2);
}

Manifest Manifest::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("manifest parse error: ") + e.what());
  }
  Manifest m;
  const auto need_string = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string())
      throw std::invalid_argument(std::string("manifest.") + key + ": required string");
    return j[key].get<std::string>();
  };
  m.kind = need_string("kind");
  m.preset = j.value("preset", std::string());
  m.model_json = j.value("model_json", std::string());
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw std::invalid_argument("manifest.seed: required unsigned integer");
    m.seed = j["seed"].get<std::uint64_t>();
  }
  m.version = j.value("version", m.version);
  if (j.contains("k_list")) m.k_list = j["k_list"].get<std::vector<int>>();
  if (j.contains("eps_list")) m.eps_list = j["eps_list"].get<std::vector<double>>();
  if (j.contains("n_list")) m.n_list = j["n_list"].get<std::vector<std::int64_t>>();
  if (j.contains("n_samples")) m.n_samples = j["n_samples"].get<std::uint64_t>();
  if (j.contains("step_caps")) m.step_caps = j["step_caps"].get<std::vector<std::uint64_t>>();
  if (j.contains("grid_size")) m.grid_size = j["grid_size"].get<int>();
  if (j.contains("dim")) m.dim = j["dim"].get<int>();
  if (j.contains("eps")) m.eps = j["eps"].get<double>();
  if (j.contains("mode")) m.mode = j["mode"].get<std::string>();
  if (j.contains("rn_n")) m.rn_n = j["rn_n"].get<std::uint64_t>();
  return m;
}

std::string verdicts_to_json(const std::vector<Verdict>& verdicts,
                             std::uint64_t manifest_hash) {
  json j;
  j["manifest_hash"] = hex64(manifest_hash);
  json arr = json::array();
  for (const Verdict& v : verdicts) {
    json e;
    e["name"] = v.name;
    e["statistic"] = v.statistic;
    e["n"] = v.n;
    e["threshold"] = v.threshold;
    e["verdict"] = v.pass ? "pass" : "fail";
    if (!v.note.empty()) e["note"] = v.note;
    arr.push_back(e);
  }
  j["verdicts"] = arr;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace zrec
