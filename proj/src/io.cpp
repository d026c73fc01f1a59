#include "simlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace simlab {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_full_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size();
}

const ConfigValue& require(const ConfigMap& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end())
    throw std::invalid_argument("config: missing key '" + key + "'");
  return it->second;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key on line " +
                                  std::to_string(lineno));
    ConfigValue v;
    v.raw = val;
    if (val == "true" || val == "false") {
      v.kind = ConfigValue::Kind::Bool;
      v.boolean = val == "true";
    } else if (!val.empty() && val.front() == '[') {
      if (val.back() != ']')
        throw std::invalid_argument("config: unterminated array on line " +
                                    std::to_string(lineno));
      v.kind = ConfigValue::Kind::Array;
      std::string body = trim(val.substr(1, val.size() - 2));
      if (!body.empty()) {
        std::istringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
          double x = 0;
          if (!parse_full_double(trim(item), x))
            throw std::invalid_argument("config: bad array element '" +
                                        trim(item) + "' on line " +
                                        std::to_string(lineno));
          v.array.push_back(x);
        }
      }
    } else if (double x = 0; parse_full_double(val, x)) {
      v.kind = ConfigValue::Kind::Number;
      v.number = x;
    } else {
      v.kind = ConfigValue::Kind::String;
      v.text = val;
    }
    out[key] = std::move(v);
  }
  return out;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

bool config_has(const ConfigMap& m, const std::string& key) {
  return m.count(key) > 0;
}

bool config_bool(const ConfigMap& m, const std::string& key, bool fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  if (it->second.kind != ConfigValue::Kind::Bool)
    throw std::invalid_argument("config: '" + key + "' must be true or false");
  return it->second.boolean;
}

double config_number(const ConfigMap& m, const std::string& key) {
  const ConfigValue& v = require(m, key);
  if (v.kind != ConfigValue::Kind::Number)
    throw std::invalid_argument("config: '" + key + "' must be a number");
  return v.number;
}

double config_number(const ConfigMap& m, const std::string& key, double fallback) {
  return config_has(m, key) ? config_number(m, key) : fallback;
}

long config_int(const ConfigMap& m, const std::string& key) {
  double x = config_number(m, key);
  long n = static_cast<long>(x);
  if (static_cast<double>(n) != x)
    throw std::invalid_argument("config: '" + key + "' must be an integer");
  return n;
}

long config_int(const ConfigMap& m, const std::string& key, long fallback) {
  return config_has(m, key) ? config_int(m, key) : fallback;
}

std::uint64_t config_u64(const ConfigMap& m, const std::string& key,
                         std::uint64_t fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  const std::string& raw = it->second.raw;
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
  if (ec != std::errc() || p != raw.data() + raw.size())
    throw std::invalid_argument("config: '" + key +
                                "' must be an unsigned integer");
  return out;
}

std::optional<std::uint64_t> config_opt_u64(const ConfigMap& m,
                                            const std::string& key) {
  if (!config_has(m, key)) return std::nullopt;
  return config_u64(m, key, 0);
}

std::string config_string(const ConfigMap& m, const std::string& key,
                          const std::string& fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  const ConfigValue& v = it->second;
  return v.kind == ConfigValue::Kind::String ? v.text : v.raw;
}

std::vector<double> config_array(const ConfigMap& m, const std::string& key) {
  const ConfigValue& v = require(m, key);
  if (v.kind == ConfigValue::Kind::Array) return v.array;
  if (v.kind == ConfigValue::Kind::Number) return {v.number};
  throw std::invalid_argument("config: '" + key + "' must be an array");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::pair<int, int>> all_entries(int d) {
  std::vector<std::pair<int, int>> v;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v.emplace_back(i, j);
  return v;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::pair<int, int>>& gsn_entries) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  const int d = traj.dim();
  std::vector<std::pair<int, int>> gsn;
  if (traj.has_decomposition)
    gsn = gsn_entries.empty() ? all_entries(d) : gsn_entries;

  out << "t,loss_pop,loss_test";
  for (int k = 0; k < d; ++k) out << ",f_" << k;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out << ",w_" << i << j;
  for (auto [i, j] : gsn)
    out << ",g_" << i << j << ",s_" << i << j << ",n_" << i << j;
  out << "\n";

  for (long t = 0; t < traj.steps(); ++t) {
    out << format_double(traj.times[t]) << ','
        << format_double(traj.loss_population[t]) << ','
        << format_double(traj.loss_test[t]);
    for (int k = 0; k < d; ++k) out << ',' << format_double(traj.outputs[t][k]);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        out << ',' << format_double(traj.weights[t](i, j));
    for (auto [i, j] : gsn)
      out << ',' << format_double(traj.growth[t](i, j)) << ','
          << format_double(traj.suppression[t](i, j)) << ','
          << format_double(traj.noise[t](i, j));
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::string& path, const TrajectoryMeta& meta) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trajectory '" + path + "'");
  std::string header;
  if (!std::getline(in, header))
    throw std::invalid_argument("trajectory '" + path + "' is empty");

  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(trim(c));
  }
  const int d = meta.dim;
  const size_t base = 3 + static_cast<size_t>(d) + static_cast<size_t>(d) * d;
  if (cols.size() < base)
    throw std::invalid_argument("trajectory '" + path +
                                "': too few columns for d=" + std::to_string(d));
  // G/S/N columns come in (g,s,n) triples after the weight block.
  std::vector<std::pair<int, int>> gsn;
  for (size_t c = base; c + 2 < cols.size(); c += 3) {
    const std::string& name = cols[c];
    if (name.size() < 4 || name.compare(0, 2, "g_") != 0)
      throw std::invalid_argument("trajectory '" + path +
                                  "': unexpected column '" + name + "'");
    // Single-digit indices per the header convention.
    int i = name[2] - '0';
    int j = name[3] - '0';
    gsn.emplace_back(i, j);
  }
  if (base + 3 * gsn.size() != cols.size())
    throw std::invalid_argument("trajectory '" + path +
                                "': incomplete g/s/n column group");

  Trajectory traj;
  traj.meta = meta;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> vals;
    vals.reserve(cols.size());
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      double x = 0;
      if (!parse_full_double(trim(cell), x))
        throw std::invalid_argument("trajectory '" + path + "': bad value '" +
                                    cell + "'");
      vals.push_back(x);
    }
    if (vals.size() != cols.size())
      throw std::invalid_argument("trajectory '" + path +
                                  "': row width mismatch");
    size_t c = 0;
    traj.times.push_back(vals[c++]);
    traj.loss_population.push_back(vals[c++]);
    traj.loss_test.push_back(vals[c++]);
    Eigen::VectorXd f(d);
    for (int k = 0; k < d; ++k) f[k] = vals[c++];
    traj.outputs.push_back(std::move(f));
    Eigen::MatrixXd W(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) W(i, j) = vals[c++];
    traj.weights.push_back(std::move(W));
    if (!gsn.empty()) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
      Eigen::MatrixXd n = Eigen::MatrixXd::Zero(d, d);
      for (auto [i, j] : gsn) {
        g(i, j) = vals[c++];
        s(i, j) = vals[c++];
        n(i, j) = vals[c++];
      }
      traj.growth.push_back(std::move(g));
      traj.suppression.push_back(std::move(s));
      traj.noise.push_back(std::move(n));
    }
  }
  traj.has_decomposition =
      !gsn.empty() && gsn.size() == static_cast<size_t>(d) * d;
  traj.has_noise = traj.has_decomposition;
  return traj;
}

void write_trajectory_meta(const std::string& path, const TrajectoryMeta& meta,
                           const ConfigMap& config_echo) {
  nlohmann::json j;
  j["model"] = model_kind_name(meta.model);
  j["d"] = meta.dim;
  j["d_prime"] = meta.d_prime;
  j["eta"] = meta.eta;
  j["seed"] = meta.seed;
  j["a"] = std::vector<double>(meta.a.data(), meta.a.data() + meta.a.size());
  j["x_hat"] =
      std::vector<double>(meta.x_hat.data(), meta.x_hat.data() + meta.x_hat.size());
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : config_echo) cfg[k] = v.raw;
  j["config"] = cfg;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

TrajectoryMeta read_trajectory_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open meta '" + path + "'");
  nlohmann::json j;
  in >> j;
  TrajectoryMeta meta;
  meta.model = model_kind_from_name(j.at("model").get<std::string>());
  meta.dim = j.at("d").get<int>();
  meta.d_prime = j.value("d_prime", 0);
  meta.eta = j.at("eta").get<double>();
  meta.seed = j.value("seed", 0ull);
  auto av = j.at("a").get<std::vector<double>>();
  meta.a = Eigen::Map<Eigen::VectorXd>(av.data(), av.size());
  auto xv = j.at("x_hat").get<std::vector<double>>();
  meta.x_hat = Eigen::Map<Eigen::VectorXd>(xv.data(), xv.size());
  return meta;
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << "cluster";
  for (int k = 0; k < dataset.dim(); ++k) out << ",x_" << k;
  out << "\n";
  for (int i = 0; i < dataset.size(); ++i) {
    out << dataset.cluster_of[i];
    for (int k = 0; k < dataset.dim(); ++k)
      out << ',' << format_double(dataset.points(i, k));
    out << "\n";
  }
}

SimConfig sim_config_from_map(const ConfigMap& m) {
  SimConfig cfg;
  cfg.d = static_cast<int>(config_int(m, "d"));
  cfg.s = static_cast<int>(config_int(m, "s"));
  cfg.n = static_cast<int>(config_int(m, "n", 1));
  auto fill = [&](const char* key) {
    std::vector<double> v = config_array(m, key);
    if (static_cast<int>(v.size()) != cfg.d && static_cast<int>(v.size()) != cfg.s)
      throw std::invalid_argument(std::string("config: '") + key +
                                  "' must have length s or d");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(cfg.d);
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
  };
  cfg.mu = fill("mu");
  cfg.sigma = fill("sigma");
  cfg.include_origin_cluster = config_bool(m, "include_origin_cluster", false);
  cfg.rotation_seed = config_opt_u64(m, "rotation_seed");
  cfg.validate();
  return cfg;
}

int max_parallelism() {
  if (const char* env = std::getenv("SIMLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace simlab
