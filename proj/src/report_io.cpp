#include "simlab/report_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace simlab {

namespace {

using nlohmann::json;

void dump(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

json lemma_to_json(const LemmaReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json e;
    e["entry"] = {c.i, c.j};
    e["bound"] = c.bound;
    e["checked_range"] = {c.checked_begin, c.checked_end};
    e["min_margin"] = c.min_margin;
    if (c.first_violation)
      e["first_violation_step"] = *c.first_violation;
    else
      e["first_violation_step"] = nullptr;
    checks.push_back(std::move(e));
  }
  json j;
  j["lemma"] = rep.lemma;
  j["vacuous"] = rep.vacuous;
  j["violations"] = rep.violation_count();
  j["checks"] = std::move(checks);
  j["derived_times"] = rep.derived_times;
  return j;
}

}  // namespace

long total_violations(const std::vector<LemmaReport>& lemmas) {
  long n = 0;
  for (const auto& l : lemmas) n += l.violation_count();
  return n;
}

void write_verification_json(const std::string& path, const AssumptionReport& assumptions,
                             const std::vector<LemmaReport>& lemmas) {
  json ja = json::array();
  for (const auto& c : assumptions.checks) {
    json e;
    e["assumption_id"] = c.id;
    e["detail"] = c.detail;
    e["lhs"] = c.lhs;
    e["rhs"] = c.rhs;
    e["pass"] = c.pass;
    ja.push_back(std::move(e));
  }
  json jl = json::array();
  for (const auto& l : lemmas) jl.push_back(lemma_to_json(l));
  json j;
  j["assumptions"] = std::move(ja);
  j["assumptions_pass"] = assumptions.all_pass();
  j["ordering_flag"] = assumptions.ordering_flag;
  j["lemmas"] = std::move(jl);
  j["total_violations"] = total_violations(lemmas);
  dump(path, j);
}

void write_descents_json(const std::string& path, const DescentSummary& summary) {
  json segs = json::array();
  for (const auto& s : summary.segments)
    segs.push_back({{"peak", s.peak}, {"valley", s.valley}});
  dump(path, json{{"descents", summary.count}, {"segments", std::move(segs)}});
}

void write_order_json(const std::string& path, const LearningOrder& order) {
  dump(path, json{{"order", order.order},
                  {"crossing_steps", order.crossing_steps},
                  {"coordinates", order.coordinates}});
}

void write_slowdown_json(const std::string& path, const std::vector<double>& speeds,
                         int window) {
  dump(path, json{{"window", window}, {"speeds", speeds}});
}

void write_lattice_json(const std::string& path, const LatticeResult& result, int s) {
  json epochs = json::array();
  for (size_t e = 0; e < result.epochs.size(); ++e) {
    json lattice = json::object();
    for (unsigned m = 0; m < result.losses[e].size(); ++m) {
      std::string key;
      for (int p = 0; p < s; ++p) key += ((m >> p) & 1u) ? '1' : '0';
      lattice[key] = result.losses[e][m];
    }
    epochs.push_back({{"epoch", result.epochs[e]}, {"lattice", std::move(lattice)}});
  }
  json viols = json::array();
  for (const auto& v : result.violations)
    viols.push_back({{"epoch", v.epoch},
                     {"u", v.u},
                     {"v", v.v},
                     {"loss_u", v.loss_u},
                     {"loss_v", v.loss_v}});
  dump(path, json{{"epochs", std::move(epochs)}, {"violations", std::move(viols)}});
}

void write_failure_json(const std::string& path,
                        const std::vector<TrappedEntry>& trapped) {
  json arr = json::array();
  for (const auto& t : trapped)
    arr.push_back({{"index", t.index}, {"step", t.step}, {"reason", t.reason}});
  dump(path, json{{"trapped", std::move(arr)}});
}

}  // namespace simlab
