#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace saddle {

/// Step-size sequences alpha_k, k >= 0.
///
/// Every schedule is positive and nonincreasing. Construction goes through the
/// factory functions below, which validate parameters; a table whose values
/// are not monotone (or do not join their tail monotonically) is rejected.
class StepSchedule {
 public:
  struct Power {
    double c;
    double p;
    std::int64_t offset;
  };
  struct Constant {
    double c;
  };
  struct Geometric {
    double c;
    double r;
  };
  struct Table {
    std::vector<double> values;
    std::shared_ptr<const StepSchedule> tail;
  };
  using Kind = std::variant<Power, Constant, Geometric, Table>;

  /// c / (k + offset)^p
  static StepSchedule power(double c, double p, std::int64_t offset = 2);
  static StepSchedule constant(double c);
  /// c * r^k, floored at the smallest positive double so value(k) stays > 0.
  static StepSchedule geometric(double c, double r);
  /// values[k] for k < values.size(), tail.value(k) afterwards (absolute index).
  static StepSchedule table(std::vector<double> values, StepSchedule tail);

  [[nodiscard]] double value(std::int64_t k) const;
  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  /// Human-readable id, e.g. "power(c=1,p=1,offset=2)".
  [[nodiscard]] std::string id() const;

 private:
  explicit StepSchedule(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

enum class SumClass { divergent_sum, convergent_sum };

[[nodiscard]] const char* to_string(SumClass c) noexcept;

[[nodiscard]] inline double value(const StepSchedule& s, std::int64_t k) {
  return s.value(k);
}

/// Closed-form p-test: power diverges iff p <= 1, constant diverges, geometric
/// converges, table follows its tail.
[[nodiscard]] SumClass classify_sum(const StepSchedule& s);

/// sum_{t=0}^{k} alpha_t by direct accumulation.
[[nodiscard]] double partial_sum(const StepSchedule& s, std::int64_t k);

/// Analytic upper bound on sum_{t > k0} alpha_t; +inf for divergent schedules.
[[nodiscard]] double tail_bound(const StepSchedule& s, std::int64_t k0);

/// Named presets used by the CLI and the test suites:
/// "harmonic" 1/(k+2), "sqrt" 1/sqrt(k+1), "quartic" 1/(k+1)^4,
/// "constant" 0.1, "geometric" 0.1*0.9^k.
[[nodiscard]] StepSchedule builtin_schedule(const std::string& name);
[[nodiscard]] std::vector<std::string> builtin_schedule_names();

}  // namespace saddle
