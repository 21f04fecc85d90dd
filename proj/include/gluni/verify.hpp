#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace gluni {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string expected;
  std::string tolerance;
  std::string note;
  double seconds = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

// fast: closed-form and flow checks; full: adds the GL continuation runs.
[[nodiscard]] std::vector<int> suite_criteria(const std::string& suite);

// Runs one acceptance criterion (1..12). Numerical exceptions become failures.
[[nodiscard]] CheckResult run_criterion(int id);

[[nodiscard]] std::vector<CheckResult> run_suite(const std::string& suite,
                                                 const std::function<void(const CheckResult&)>& on_result = {});

// One line per criterion: "[PASS] 5 name  measured ... expected ... tol ...".
[[nodiscard]] std::string format_line(const CheckResult& r);
void print_table(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace gluni
