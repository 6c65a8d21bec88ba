#include "subpress/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "subpress/metric.hpp"
#include "subpress/pressure.hpp"

namespace subpress {
namespace {

using Json = nlohmann::ordered_json;

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }

std::string elem(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
}

void expect_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(child(path, item.key()), "unknown field");
  }
}

const Json& member(const Json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(child(path, key), "required field is missing");
  return *it;
}

double get_double(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "must be a number");
  return j.get<double>();
}

int get_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "must be an integer");
  auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(path, "out of range");
  return static_cast<int>(v);
}

std::uint64_t get_u64(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer())
    throw ConfigError(path, "must be a non-negative integer");
  if (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)
    throw ConfigError(path, "must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "must be a string");
  return j.get<std::string>();
}

std::vector<double> get_double_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], elem(path, i)));
  return out;
}

std::vector<int> get_int_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "must be an array of integers");
  std::vector<int> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], elem(path, i)));
  return out;
}

// A square matrix encoded as an array of equal-length number rows.
Mat get_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "must be a non-empty array of rows");
  const std::size_t dim = j.size();
  Mat m(static_cast<int>(dim), static_cast<int>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    std::vector<double> row = get_double_array(j[r], elem(path, r));
    if (row.size() != dim)
      throw ConfigError(elem(path, r), "row length " + std::to_string(row.size()) +
                                           " does not match matrix dimension " + std::to_string(dim));
    for (std::size_t c = 0; c < dim; ++c) m(static_cast<int>(r), static_cast<int>(c)) = row[c];
  }
  return m;
}

void parse_system(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"weights", "permutation", "alphabet", "transitions"});
  SystemSpec& spec = cfg.system_spec;
  spec.weights = get_double_array(member(j, path, "weights"), child(path, "weights"));
  spec.permutation = get_int_array(member(j, path, "permutation"), child(path, "permutation"));
  spec.alphabet = get_int(member(j, path, "alphabet"), child(path, "alphabet"));
  if (spec.alphabet < 1) throw ConfigError(child(path, "alphabet"), "must be at least 1");

  const Json& trans = member(j, path, "transitions");
  const std::string tpath = child(path, "transitions");
  if (!trans.is_array()) throw ConfigError(tpath, "must be an array (one matrix per fiber)");
  if (trans.size() != spec.weights.size())
    throw ConfigError(tpath, "expected " + std::to_string(spec.weights.size()) +
                                 " fiber matrices, got " + std::to_string(trans.size()));
  const std::size_t a = static_cast<std::size_t>(spec.alphabet);
  spec.transitions.clear();
  for (std::size_t f = 0; f < trans.size(); ++f) {
    const std::string fpath = elem(tpath, f);
    const Json& tm = trans[f];
    if (!tm.is_array() || tm.size() != a)
      throw ConfigError(fpath, "must be an array of " + std::to_string(a) + " rows");
    std::vector<int> flat;
    flat.reserve(a * a);
    for (std::size_t r = 0; r < a; ++r) {
      std::vector<int> row = get_int_array(tm[r], elem(fpath, r));
      if (row.size() != a)
        throw ConfigError(elem(fpath, r), "row must have " + std::to_string(a) + " entries");
      for (std::size_t c = 0; c < a; ++c) {
        if (row[c] != 0 && row[c] != 1)
          throw ConfigError(elem(elem(fpath, r), c), "entries must be 0 or 1");
        flat.push_back(row[c]);
      }
    }
    spec.transitions.push_back(std::move(flat));
  }

  try {
    auto base = std::make_shared<BaseSystem>(spec.permutation, spec.weights);
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(spec.transitions.size());
    for (const auto& flat : spec.transitions)
      rows.emplace_back(flat.begin(), flat.end());
    cfg.system = std::make_shared<RandomSFT>(base, spec.alphabet, std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_potential(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  PotentialSpec& spec = cfg.potential_spec;
  spec.kind = get_string(member(j, path, "kind"), child(path, "kind"));
  const std::size_t fibers = cfg.system_spec.weights.size();
  const int a = cfg.system_spec.alphabet;

  if (spec.kind == "zero") {
    expect_keys(j, path, {"kind"});
    cfg.potential = zero_potential();
  } else if (spec.kind == "constant") {
    expect_keys(j, path, {"kind", "value"});
    spec.value = get_double(member(j, path, "value"), child(path, "value"));
    cfg.potential = constant_potential(spec.value);
  } else if (spec.kind == "additive") {
    expect_keys(j, path, {"kind", "depth", "table"});
    spec.depth = get_int(member(j, path, "depth"), child(path, "depth"));
    if (spec.depth < 1) throw ConfigError(child(path, "depth"), "must be at least 1");
    const Json& table = member(j, path, "table");
    const std::string tpath = child(path, "table");
    if (!table.is_array() || table.size() != fibers)
      throw ConfigError(tpath, "must be an array of " + std::to_string(fibers) + " fiber rows");
    std::size_t cells = 1;
    for (int d = 0; d < spec.depth; ++d) cells *= static_cast<std::size_t>(a);
    spec.table.clear();
    for (std::size_t f = 0; f < table.size(); ++f) {
      std::vector<double> row = get_double_array(table[f], elem(tpath, f));
      if (row.size() != cells)
        throw ConfigError(elem(tpath, f), "expected " + std::to_string(cells) +
                                              " entries (alphabet^depth), got " +
                                              std::to_string(row.size()));
      spec.table.push_back(std::move(row));
    }
    try {
      cfg.potential = additive_potential(cfg.system->base_ptr(), a, spec.depth, spec.table);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
  } else if (spec.kind == "matrix_cocycle") {
    expect_keys(j, path, {"kind", "matrices", "norm"});
    spec.norm = j.contains("norm") ? get_string(j["norm"], child(path, "norm")) : "inf";
    MatrixNorm norm;
    if (spec.norm == "inf") {
      norm = MatrixNorm::Infinity;
    } else if (spec.norm == "two") {
      norm = MatrixNorm::Two;
    } else {
      throw ConfigError(child(path, "norm"), "must be \"inf\" or \"two\"");
    }
    const Json& mats = member(j, path, "matrices");
    const std::string mpath = child(path, "matrices");
    if (!mats.is_array() || mats.size() != fibers)
      throw ConfigError(mpath, "must be an array of " + std::to_string(fibers) + " fiber blocks");
    spec.matrices.clear();
    int dim = 0;
    for (std::size_t f = 0; f < mats.size(); ++f) {
      const std::string fpath = elem(mpath, f);
      const Json& per_symbol = mats[f];
      if (!per_symbol.is_array() || per_symbol.size() != static_cast<std::size_t>(a))
        throw ConfigError(fpath, "must hold one matrix per symbol (" + std::to_string(a) + ")");
      std::vector<Mat> row;
      for (std::size_t s = 0; s < per_symbol.size(); ++s) {
        Mat m = get_matrix(per_symbol[s], elem(fpath, s));
        if (dim == 0) dim = m.rows();
        if (m.rows() != dim)
          throw ConfigError(elem(fpath, s), "all cocycle matrices must share one dimension");
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c)
            if (m(r, c) < 0.0)
              throw ConfigError(elem(fpath, s), "cocycle matrix entries must be non-negative");
        row.push_back(std::move(m));
      }
      spec.matrices.push_back(std::move(row));
    }
    try {
      cfg.potential = matrix_cocycle_potential(cfg.system->base_ptr(), a, spec.matrices, norm);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
  } else {
    throw ConfigError(child(path, "kind"),
                      "must be one of \"zero\", \"constant\", \"additive\", \"matrix_cocycle\"");
  }
}

void parse_metric(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"lambda", "epsilon", "depth"});
  cfg.lambda = get_double(member(j, path, "lambda"), child(path, "lambda"));
  if (!(cfg.lambda > 0.0) || !(cfg.lambda < 1.0))
    throw ConfigError(child(path, "lambda"), "must lie strictly between 0 and 1");
  const bool has_eps = j.contains("epsilon");
  const bool has_depth = j.contains("depth");
  if (has_eps == has_depth)
    throw ConfigError(path, "exactly one of \"epsilon\" and \"depth\" must be given");
  if (has_depth) {
    cfg.depth = get_int(j["depth"], child(path, "depth"));
    if (cfg.depth < 0) throw ConfigError(child(path, "depth"), "must be non-negative");
  } else {
    double eps = get_double(j["epsilon"], child(path, "epsilon"));
    if (!(eps > 0.0) || !(eps <= 1.0))
      throw ConfigError(child(path, "epsilon"), "must lie in (0, 1]");
    cfg.depth = separation_depth(cfg.lambda, eps);
  }
}

std::vector<int> parse_schedule(const Json& j, const std::string& path) {
  std::vector<int> sched = get_int_array(j, path);
  if (sched.empty()) throw ConfigError(path, "must be non-empty");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (sched[i] < 1) throw ConfigError(elem(path, i), "horizons must be positive");
    if (i > 0 && sched[i] <= sched[i - 1])
      throw ConfigError(elem(path, i), "horizons must be strictly increasing");
  }
  return sched;
}

void parse_schedules(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"pressure", "entropy", "phi_horizon"});
  cfg.pressure_schedule = parse_schedule(member(j, path, "pressure"), child(path, "pressure"));
  cfg.entropy_schedule = j.contains("entropy")
                             ? parse_schedule(j["entropy"], child(path, "entropy"))
                             : cfg.pressure_schedule;
  if (j.contains("phi_horizon")) {
    cfg.phi_horizon = get_int(j["phi_horizon"], child(path, "phi_horizon"));
    if (cfg.phi_horizon < 1) throw ConfigError(child(path, "phi_horizon"), "must be at least 1");
  }
}

void parse_optimizer(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"starts", "max_evals", "seed", "step", "tol"});
  OptimizerOptions& opt = cfg.optimizer;
  if (j.contains("starts")) {
    opt.starts = get_int(j["starts"], child(path, "starts"));
    if (opt.starts < 1) throw ConfigError(child(path, "starts"), "must be at least 1");
  }
  if (j.contains("max_evals")) {
    opt.max_evals = get_int(j["max_evals"], child(path, "max_evals"));
    if (opt.max_evals < 2) throw ConfigError(child(path, "max_evals"), "must be at least 2");
  }
  if (j.contains("seed")) opt.seed = get_u64(j["seed"], child(path, "seed"));
  if (j.contains("step")) {
    opt.step = get_double(j["step"], child(path, "step"));
    if (!(opt.step > 0.0)) throw ConfigError(child(path, "step"), "must be positive");
  }
  if (j.contains("tol")) {
    opt.tol = get_double(j["tol"], child(path, "tol"));
    if (!(opt.tol > 0.0)) throw ConfigError(child(path, "tol"), "must be positive");
  }
}

void parse_measure(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"kernels", "sample_seed"});
  const bool has_kernels = j.contains("kernels");
  const bool has_seed = j.contains("sample_seed");
  if (has_kernels == has_seed)
    throw ConfigError(path, "exactly one of \"kernels\" and \"sample_seed\" must be given");
  MeasureSpec spec;
  if (has_seed) {
    spec.sampled = true;
    spec.sample_seed = get_u64(j["sample_seed"], child(path, "sample_seed"));
    cfg.measure = sample_markov_measure(cfg.system, spec.sample_seed);
  } else {
    const Json& kj = j["kernels"];
    const std::string kpath = child(path, "kernels");
    const std::size_t fibers = cfg.system_spec.weights.size();
    if (!kj.is_array() || kj.size() != fibers)
      throw ConfigError(kpath, "must hold one kernel matrix per fiber (" + std::to_string(fibers) + ")");
    for (std::size_t f = 0; f < kj.size(); ++f) {
      Mat k = get_matrix(kj[f], elem(kpath, f));
      if (k.rows() != cfg.system_spec.alphabet)
        throw ConfigError(elem(kpath, f), "kernel dimension must equal the alphabet size");
      spec.kernels.push_back(std::move(k));
    }
    try {
      cfg.measure = RandomMarkovMeasure::from_kernels(cfg.system, spec.kernels);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(kpath, e.what());
    }
  }
  cfg.measure_spec = std::move(spec);
}

void parse_power(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"k"});
  if (j.contains("k")) {
    cfg.power_k = get_int(j["k"], child(path, "k"));
    if (cfg.power_k < 1) throw ConfigError(child(path, "k"), "must be at least 1");
  }
}

void parse_budget(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  require_object(j, path);
  expect_keys(j, path, {"nodes", "exact_phi", "samples"});
  if (j.contains("nodes")) {
    cfg.budget.nodes = get_double(j["nodes"], child(path, "nodes"));
    if (!(cfg.budget.nodes >= 1.0)) throw ConfigError(child(path, "nodes"), "must be at least 1");
  }
  if (j.contains("exact_phi")) {
    cfg.budget.exact_phi = get_double(j["exact_phi"], child(path, "exact_phi"));
    if (!(cfg.budget.exact_phi >= 0.0))
      throw ConfigError(child(path, "exact_phi"), "must be non-negative");
  }
  if (j.contains("samples")) {
    if (!j["samples"].is_number_integer())
      throw ConfigError(child(path, "samples"), "must be an integer");
    cfg.budget.samples = j["samples"].get<long long>();
    if (cfg.budget.samples < 1) throw ConfigError(child(path, "samples"), "must be at least 1");
  }
}

Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("$", "invalid JSON at line " + std::to_string(line) + ", column " +
                               std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("$", "top level must be an object");
  expect_keys(root, "$",
              {"system", "potential", "metric", "schedules", "optimizer", "measure", "power",
               "budget"});

  ExperimentConfig cfg;
  parse_system(member(root, "$", "system"), "$.system", cfg);
  parse_potential(member(root, "$", "potential"), "$.potential", cfg);
  parse_metric(member(root, "$", "metric"), "$.metric", cfg);
  parse_schedules(member(root, "$", "schedules"), "$.schedules", cfg);
  if (root.contains("optimizer")) parse_optimizer(root["optimizer"], "$.optimizer", cfg);
  if (root.contains("budget")) parse_budget(root["budget"], "$.budget", cfg);
  if (root.contains("measure")) parse_measure(root["measure"], "$.measure", cfg);
  if (root.contains("power")) parse_power(root["power"], "$.power", cfg);

  int need = min_depth_over(*cfg.potential, cfg.pressure_schedule);
  need = std::max(need, min_depth_over(*cfg.potential, cfg.entropy_schedule));
  if (cfg.depth < need)
    throw ConfigError("$.metric", "separation depth " + std::to_string(cfg.depth) +
                                      " is below the minimum " + std::to_string(need) +
                                      " required by the potential over the schedules");

  cfg.optimizer.horizon = cfg.phi_horizon;
  cfg.optimizer.exact_budget = cfg.budget.exact_phi;
  cfg.optimizer.samples = cfg.budget.samples;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("$", "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  Json root;

  Json system;
  system["weights"] = cfg.system_spec.weights;
  system["permutation"] = cfg.system_spec.permutation;
  system["alphabet"] = cfg.system_spec.alphabet;
  Json trans = Json::array();
  const int a = cfg.system_spec.alphabet;
  for (const auto& flat : cfg.system_spec.transitions) {
    Json fiber = Json::array();
    for (int r = 0; r < a; ++r) {
      Json row = Json::array();
      for (int c = 0; c < a; ++c) row.push_back(flat[static_cast<std::size_t>(r) * a + c]);
      fiber.push_back(std::move(row));
    }
    trans.push_back(std::move(fiber));
  }
  system["transitions"] = std::move(trans);
  root["system"] = std::move(system);

  Json pot;
  pot["kind"] = cfg.potential_spec.kind;
  if (cfg.potential_spec.kind == "constant") {
    pot["value"] = cfg.potential_spec.value;
  } else if (cfg.potential_spec.kind == "additive") {
    pot["depth"] = cfg.potential_spec.depth;
    pot["table"] = cfg.potential_spec.table;
  } else if (cfg.potential_spec.kind == "matrix_cocycle") {
    Json mats = Json::array();
    for (const auto& per_fiber : cfg.potential_spec.matrices) {
      Json fiber = Json::array();
      for (const Mat& m : per_fiber) fiber.push_back(matrix_json(m));
      mats.push_back(std::move(fiber));
    }
    pot["matrices"] = std::move(mats);
    pot["norm"] = cfg.potential_spec.norm;
  }
  root["potential"] = std::move(pot);

  Json metric;
  metric["lambda"] = cfg.lambda;
  metric["depth"] = cfg.depth;
  root["metric"] = std::move(metric);

  Json schedules;
  schedules["pressure"] = cfg.pressure_schedule;
  schedules["entropy"] = cfg.entropy_schedule;
  schedules["phi_horizon"] = cfg.phi_horizon;
  root["schedules"] = std::move(schedules);

  Json optimizer;
  optimizer["starts"] = cfg.optimizer.starts;
  optimizer["max_evals"] = cfg.optimizer.max_evals;
  optimizer["seed"] = cfg.optimizer.seed;
  optimizer["step"] = cfg.optimizer.step;
  optimizer["tol"] = cfg.optimizer.tol;
  root["optimizer"] = std::move(optimizer);

  Json budget;
  budget["nodes"] = cfg.budget.nodes;
  budget["exact_phi"] = cfg.budget.exact_phi;
  budget["samples"] = cfg.budget.samples;
  root["budget"] = std::move(budget);

  if (cfg.measure_spec) {
    Json measure;
    if (cfg.measure_spec->sampled) {
      measure["sample_seed"] = cfg.measure_spec->sample_seed;
    } else {
      Json kernels = Json::array();
      for (const Mat& k : cfg.measure_spec->kernels) kernels.push_back(matrix_json(k));
      measure["kernels"] = std::move(kernels);
    }
    root["measure"] = std::move(measure);
  }

  Json power;
  power["k"] = cfg.power_k;
  root["power"] = std::move(power);

  return root.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace subpress
