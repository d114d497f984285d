// Check results for inequality and consistency suites, serializable to JSON.

#ifndef VEXLAB_VALIDATION_HPP
#define VEXLAB_VALIDATION_HPP

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vexlab/domain.hpp"

namespace vexlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double slack = 0.0;       // worst-case margin; negative means violated
  Point worst{0.0, 0.0};    // location of the worst case, when meaningful
  double worst_aux = 0.0;   // extra coordinate of the worst case (e.g. an s value)
  std::string note;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
  }

  const CheckResult& find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::out_of_range("ValidationReport: no check named '" + std::string(name) + "'");
  }

  bool has(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return true;
    return false;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["all_pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["slack"] = c.slack;
      jc["worst"] = {c.worst.x, c.worst.y};
      if (c.worst_aux != 0.0) jc["worst_aux"] = c.worst_aux;
      if (!c.note.empty()) jc["note"] = c.note;
      j["checks"].push_back(jc);
    }
    return j;
  }
};

}  // namespace vexlab

#endif  // VEXLAB_VALIDATION_HPP
