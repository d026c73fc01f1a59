#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simlab/dataset.hpp"
#include "simlab/sim_config.hpp"
#include "simlab/trajectory.hpp"

namespace simlab {

// Flat key-value config document: `key = value` lines, '#' comments.
// Values: booleans (true/false), numbers, bracketed float arrays
// ([1, 2.5, 3]), bare strings.
struct ConfigValue {
  enum class Kind { Bool, Number, String, Array };
  Kind kind = Kind::String;
  bool boolean = false;
  double number = 0;
  std::string text;
  std::vector<double> array;
  std::string raw;  // original token, for exact 64-bit integer parses
};

using ConfigMap = std::map<std::string, ConfigValue>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// Typed lookups; throw std::invalid_argument on missing keys / wrong types.
bool config_bool(const ConfigMap& m, const std::string& key, bool fallback);
double config_number(const ConfigMap& m, const std::string& key);
double config_number(const ConfigMap& m, const std::string& key, double fallback);
long config_int(const ConfigMap& m, const std::string& key);
long config_int(const ConfigMap& m, const std::string& key, long fallback);
std::uint64_t config_u64(const ConfigMap& m, const std::string& key, std::uint64_t fallback);
std::optional<std::uint64_t> config_opt_u64(const ConfigMap& m, const std::string& key);
std::string config_string(const ConfigMap& m, const std::string& key, const std::string& fallback);
std::vector<double> config_array(const ConfigMap& m, const std::string& key);
bool config_has(const ConfigMap& m, const std::string& key);

// 17-significant-digit formatting used for all CSV output; round-trips
// doubles exactly.
std::string format_double(double x);

// Trajectory CSV: header
//   t,loss_pop,loss_test,f_0..f_{d-1},w_00..w_{d-1d-1}[,g_ij,s_ij,n_ij ...]
// one row per recorded step, row-major weight entries. G/S/N columns are
// emitted for the entries listed in gsn_entries (pairs), or all entries
// when the trajectory has a full decomposition and gsn_entries is empty.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::pair<int, int>>& gsn_entries = {});

// Re-reads a trajectory CSV written by write_trajectory_csv. The meta block
// (model, a, eta, x_hat) comes from the JSON sidecar.
Trajectory read_trajectory_csv(const std::string& path, const TrajectoryMeta& meta);

// JSON sidecar with model, dimensions, spectrum, seeds and the resolved
// config echo.
void write_trajectory_meta(const std::string& path, const TrajectoryMeta& meta,
                           const ConfigMap& config_echo);
TrajectoryMeta read_trajectory_meta(const std::string& path);

// Dataset CSV: header `cluster,x_0,...,x_{d-1}`.
void write_dataset_csv(const std::string& path, const Dataset& dataset);

// SimConfig from config keys (d, s, n, mu, sigma, include_origin_cluster,
// rotation_seed).
SimConfig sim_config_from_map(const ConfigMap& m);

// Parallelism cap for analyses: SIMLAB_THREADS, default 1.
int max_parallelism();

}  // namespace simlab
