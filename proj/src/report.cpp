#include "morreylab/report.hpp"

#include <cmath>
#include <ostream>

namespace morreylab {

ResultRecord record_norm(const std::string& name, const NormValue& value,
                         const std::string& op) {
  ResultRecord record;
  record.name = name;
  record.has_value = true;
  record.value = value.value;
  record.kind = norm_kind_name(value.kind);
  record.op = op;
  record.witness = value.witness;
  return record;
}

ResultRecord record_bound(const std::string& name, const OperatorBound& bound,
                          const std::string& op) {
  ResultRecord record;
  record.name = name;
  record.has_value = true;
  record.value = bound.value;
  record.kind = bound.direction == BoundDirection::exact   ? "exact"
                : bound.direction == BoundDirection::lower ? "lower_bound"
                                                           : "upper_bound";
  record.op = op;
  record.witness = bound.source;
  return record;
}

ResultRecord record_value(const std::string& name, double value,
                          const std::string& kind, const std::string& op,
                          const std::string& witness) {
  ResultRecord record;
  record.name = name;
  record.has_value = true;
  record.value = value;
  record.kind = kind;
  record.op = op;
  record.witness = witness;
  return record;
}

ResultRecord record_check(const std::string& name, bool pass,
                          const std::string& op, const std::string& witness) {
  ResultRecord record;
  record.name = name;
  record.kind = pass ? "pass" : "fail";
  record.op = op;
  record.witness = witness;
  return record;
}

void ExperimentReport::add(ResultRecord record) {
  results.push_back(std::move(record));
}

void ExperimentReport::check(const std::string& name, bool pass,
                             const std::string& op,
                             const std::string& witness) {
  all_pass = all_pass && pass;
  results.push_back(record_check(name, pass, op, witness));
}

nlohmann::json ExperimentReport::to_json(bool include_timing) const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["inputs"] = inputs;
  j["tolerances"] = tolerances;
  j["pass"] = all_pass;
  nlohmann::json records = nlohmann::json::array();
  for (const ResultRecord& r : results) {
    nlohmann::json rec;
    rec["name"] = r.name;
    if (r.has_value) {
      if (std::isinf(r.value))
        rec["value"] = "inf";
      else
        rec["value"] = r.value;
    }
    rec["kind"] = r.kind;
    rec["op"] = r.op;
    if (!r.witness.empty()) rec["witness"] = r.witness;
    records.push_back(std::move(rec));
  }
  j["results"] = std::move(records);
  if (include_timing) j["duration_ms"] = duration_ms;
  return j;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "experiment,name,value,kind,op,witness\n";
  for (const ResultRecord& r : results) {
    out << csv_escape(experiment) << ',' << csv_escape(r.name) << ',';
    if (r.has_value) {
      if (std::isinf(r.value))
        out << "inf";
      else
        out << nlohmann::json(r.value).dump();
    }
    out << ',' << csv_escape(r.kind) << ',' << csv_escape(r.op) << ','
        << csv_escape(r.witness) << '\n';
  }
}

}  // namespace morreylab
