#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "morreylab/composition.hpp"
#include "morreylab/exact_norms.hpp"

namespace morreylab {

// One numeric or verdict record; every numeric carries its kind and the
// operation that produced it.
struct ResultRecord {
  std::string name;
  bool has_value = false;
  double value = 0.0;  // meaningful when has_value; kInf renders as "inf"
  std::string kind;    // exact | lower_bound | upper_bound | approximation |
                       // pass | fail | info
  std::string op;
  std::string witness;
};

ResultRecord record_norm(const std::string& name, const NormValue& value,
                         const std::string& op);
ResultRecord record_bound(const std::string& name, const OperatorBound& bound,
                          const std::string& op);
ResultRecord record_value(const std::string& name, double value,
                          const std::string& kind, const std::string& op,
                          const std::string& witness = "");
ResultRecord record_check(const std::string& name, bool pass,
                          const std::string& op,
                          const std::string& witness = "");

struct ExperimentReport {
  std::string experiment;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  std::vector<ResultRecord> results;
  bool all_pass = true;
  double duration_ms = 0.0;  // serialized only on request: wall-clock time
                             // would break bit-identical reruns

  void add(ResultRecord record);
  // Adds a pass/fail record and folds it into all_pass.
  void check(const std::string& name, bool pass, const std::string& op,
             const std::string& witness = "");

  nlohmann::json to_json(bool include_timing = false) const;
  void write_csv(std::ostream& out) const;
};

}  // namespace morreylab
