#pragma once

#include <string>
#include <vector>

#include "simlab/phenomena.hpp"
#include "simlab/theory.hpp"

namespace simlab {

// JSON writers for analysis and verification reports. Schemas are part of
// the CLI contract; see the README.

void write_verification_json(const std::string& path, const AssumptionReport& assumptions,
                             const std::vector<LemmaReport>& lemmas);

void write_descents_json(const std::string& path, const DescentSummary& summary);
void write_order_json(const std::string& path, const LearningOrder& order);
void write_slowdown_json(const std::string& path, const std::vector<double>& speeds,
                         int window);
void write_lattice_json(const std::string& path, const LatticeResult& result, int s);
void write_failure_json(const std::string& path, const std::vector<TrappedEntry>& trapped);

// Total violations across lemma reports (vacuous reports contribute none).
long total_violations(const std::vector<LemmaReport>& lemmas);

}  // namespace simlab
