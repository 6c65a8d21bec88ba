#pragma once

// Experiment configuration: one JSON document describes the system, the
// potential, the metric, the horizon schedules, the optimizer, and an
// optional reference measure.  Parsing builds the live objects and keeps
// the primitive spec, so a config can be re-serialized canonically (fixed
// key order, materialized defaults) and hashed for provenance.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subpress/measures.hpp"
#include "subpress/potentials.hpp"
#include "subpress/system.hpp"
#include "subpress/variational.hpp"

namespace subpress {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SystemSpec {
  std::vector<double> weights;
  std::vector<int> permutation;
  int alphabet = 0;
  std::vector<std::vector<int>> transitions;  // per fiber, row-major 0/1
};

struct PotentialSpec {
  std::string kind;  // zero | constant | additive | matrix_cocycle
  double value = 0.0;
  int depth = 1;
  std::vector<std::vector<double>> table;
  std::vector<std::vector<Mat>> matrices;
  std::string norm = "inf";
};

struct MeasureSpec {
  bool sampled = false;
  std::uint64_t sample_seed = 0;
  std::vector<Mat> kernels;
};

struct BudgetConfig {
  double nodes = static_cast<double>(1 << 26);
  double exact_phi = 1e7;
  long long samples = 1 << 17;
};

struct ExperimentConfig {
  SystemSpec system_spec;
  PotentialSpec potential_spec;
  std::optional<MeasureSpec> measure_spec;

  std::shared_ptr<const RandomSFT> system;
  PotentialPtr potential;
  std::optional<RandomMarkovMeasure> measure;

  double lambda = 0.5;
  int depth = 0;  // separation depth t resolved from the metric block
  std::vector<int> pressure_schedule;
  std::vector<int> entropy_schedule;
  int phi_horizon = 12;
  OptimizerOptions optimizer;
  int power_k = 2;
  BudgetConfig budget;
};

// Parses and validates a config document; errors carry the field path.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Deterministic re-serialization: fixed key order, defaults materialized.
// parse(canonical_config(parse(text))) is the identity on the spec.
std::string canonical_config(const ExperimentConfig& cfg);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace subpress
