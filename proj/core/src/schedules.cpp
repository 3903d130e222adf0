#include "saddle/schedules.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "saddle/errors.hpp"

namespace saddle {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive_finite(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string("step schedule: ") + what + " must be a positive finite number");
  }
}

}  // namespace

StepSchedule StepSchedule::power(double c, double p, std::int64_t offset) {
  require_positive_finite(c, "c");
  require_positive_finite(p, "p");
  if (offset < 1) throw InvalidArgument("step schedule: power offset must be >= 1");
  return StepSchedule(Power{c, p, offset});
}

StepSchedule StepSchedule::constant(double c) {
  require_positive_finite(c, "c");
  return StepSchedule(Constant{c});
}

StepSchedule StepSchedule::geometric(double c, double r) {
  require_positive_finite(c, "c");
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("step schedule: geometric ratio must lie in (0, 1)");
  return StepSchedule(Geometric{c, r});
}

StepSchedule StepSchedule::table(std::vector<double> values, StepSchedule tail) {
  for (double v : values) require_positive_finite(v, "table value");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) {
      throw InvalidArgument("step schedule: table values must be nonincreasing (index " +
                            std::to_string(i) + ")");
    }
  }
  const auto n = static_cast<std::int64_t>(values.size());
  if (!values.empty() && tail.value(n) > values.back()) {
    throw InvalidArgument("step schedule: table tail starts above the last table value");
  }
  return StepSchedule(Table{std::move(values), std::make_shared<const StepSchedule>(std::move(tail))});
}

double StepSchedule::value(std::int64_t k) const {
  if (k < 0) throw InvalidArgument("step schedule: index must be >= 0");
  return std::visit(
      Overloaded{
          [k](const Power& s) {
            const double base = static_cast<double>(k + s.offset);
            if (s.p == 1.0) return s.c / base;
            if (s.p == 0.5) return s.c / std::sqrt(base);
            return s.c / std::pow(base, s.p);
          },
          [](const Constant& s) { return s.c; },
          [k](const Geometric& s) {
            return std::max(s.c * std::pow(s.r, static_cast<double>(k)),
                            std::numeric_limits<double>::denorm_min());
          },
          [k](const Table& s) {
            if (k < static_cast<std::int64_t>(s.values.size())) return s.values[static_cast<std::size_t>(k)];
            return s.tail->value(k);
          },
      },
      kind_);
}

std::string StepSchedule::id() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Power& s) { os << "power(c=" << s.c << ",p=" << s.p << ",offset=" << s.offset << ")"; },
                 [&](const Constant& s) { os << "constant(c=" << s.c << ")"; },
                 [&](const Geometric& s) { os << "geometric(c=" << s.c << ",r=" << s.r << ")"; },
                 [&](const Table& s) { os << "table(n=" << s.values.size() << ",tail=" << s.tail->id() << ")"; },
             },
             kind_);
  return os.str();
}

const char* to_string(SumClass c) noexcept {
  return c == SumClass::divergent_sum ? "divergent_sum" : "convergent_sum";
}

SumClass classify_sum(const StepSchedule& s) {
  return std::visit(Overloaded{
                        [](const StepSchedule::Power& p) {
                          return p.p <= 1.0 ? SumClass::divergent_sum : SumClass::convergent_sum;
                        },
                        [](const StepSchedule::Constant&) { return SumClass::divergent_sum; },
                        [](const StepSchedule::Geometric&) { return SumClass::convergent_sum; },
                        [](const StepSchedule::Table& t) { return classify_sum(*t.tail); },
                    },
                    s.kind());
}

double partial_sum(const StepSchedule& s, std::int64_t k) {
  double sum = 0.0;
  for (std::int64_t t = 0; t <= k; ++t) sum += s.value(t);
  return sum;
}

double tail_bound(const StepSchedule& s, std::int64_t k0) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      Overloaded{
          [&](const StepSchedule::Power& p) {
            if (p.p <= 1.0) return inf;
            // sum_{t>k0} c/(t+o)^p <= int_{k0}^inf c/(t+o)^p dt
            return p.c * std::pow(static_cast<double>(k0 + p.offset), 1.0 - p.p) / (p.p - 1.0);
          },
          [](const StepSchedule::Constant&) { return inf; },
          [&](const StepSchedule::Geometric& g) {
            return g.c * std::pow(g.r, static_cast<double>(k0 + 1)) / (1.0 - g.r);
          },
          [&](const StepSchedule::Table& t) {
            const auto n = static_cast<std::int64_t>(t.values.size());
            if (k0 + 1 >= n) return tail_bound(*t.tail, k0);
            double head = 0.0;
            for (std::int64_t i = k0 + 1; i < n; ++i) head += t.values[static_cast<std::size_t>(i)];
            return head + tail_bound(*t.tail, n - 1);
          },
      },
      s.kind());
}

StepSchedule builtin_schedule(const std::string& name) {
  if (name == "harmonic") return StepSchedule::power(1.0, 1.0, 2);
  if (name == "sqrt") return StepSchedule::power(1.0, 0.5, 1);
  if (name == "quartic") return StepSchedule::power(1.0, 4.0, 1);
  if (name == "constant") return StepSchedule::constant(0.1);
  if (name == "geometric") return StepSchedule::geometric(0.1, 0.9);
  throw InvalidArgument("unknown builtin schedule '" + name + "'");
}

std::vector<std::string> builtin_schedule_names() {
  return {"harmonic", "sqrt", "quartic", "constant", "geometric"};
}

}  // namespace saddle
