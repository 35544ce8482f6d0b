#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "yardcrp/model.hpp"

namespace yardcrp {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, std::string field = {})
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        field_(std::move(field)) {}
  int line() const { return line_; }  // 0 when unknown
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(ValidationReport report)
      : std::runtime_error("invalid bay: " + report.summary()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

class ConfigInvalid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Instance documents
//
// {
//   "columns": 3, "tiers": 4, "flexibility": 0,
//   "weights": {"rel": 1, "ret": 1, "stack": "1/2"},
//   "containers": [
//     {"id": 1, "slot": [3, 2], "departure": 1, "delta": 5, "label": "c1"},
//     {"id": 2, "slot": "incoming", "arrival": 1, "alpha": 4, "departure": "inf"}
//   ]
// }
//
// Weights are integers, decimals or "p/q" strings. "delta"/"alpha" are the
// retrieval/stacking slacks and may be omitted (filled in by the solver).

Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& instance);

Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& instance);

// ---------------------------------------------------------------------------
// Plan listings
//
//   t=1 relocate (c4,4): [3,3] -> [1,4]
//   t=2 retrieve (c1,1): [3,2] -> out
//   t=3 stack (c5,16): out -> [1,1]
//   t=4 idle
//   relocations=3 total_delay=22 objective=25
//   stacking_delay=0
//   delays=1,2,2,2,3,3,3,3,3
//
// "(c<name>,<departure>)" follows the label when there is one.

std::string serialize_plan(const Plan& plan, const Instance& instance, const PlanMetrics& metrics);
std::string serialize_moves(const Plan& plan, const Instance& instance);
std::string metrics_line(const PlanMetrics& metrics);

/// Reads the move lines of a listing; other lines are ignored. Missing
/// time-steps are Idle. Containers are matched by name.
Plan parse_plan(const std::string& text, const Instance& instance);
Plan load_plan(const std::string& path, const Instance& instance);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// ---------------------------------------------------------------------------
// Random instances

/// xoshiro256** seeded through splitmix64.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
};

struct UniformSchedule {};  // d_n = n
struct BatchedSchedule {
  std::vector<int> sizes;
  std::vector<int> starts;  // batch k departs at starts[k], starts[k]+1, ...
};
struct ExplicitSchedule {
  std::vector<int> departures;  // by id, nondecreasing; kInfiniteTime allowed at the end
};
using Schedule = std::variant<UniformSchedule, BatchedSchedule, ExplicitSchedule>;

struct IncomingBlock {
  std::vector<int> group_sizes;
  std::vector<int> group_arrivals;
  std::optional<int> stacking_slack;
};

struct GeneratorConfig {
  std::uint64_t seed = 0;
  int columns = 4;
  int tiers = 4;
  int filled_tiers = 3;
  Schedule schedule = UniformSchedule{};
  std::optional<IncomingBlock> incoming;
  std::optional<int> retrieval_slack;
  int flexibility = 0;
  Weights weights;
};

/// Throws ConfigInvalid.
void validate_config(const GeneratorConfig& config);

/// columns*filled_tiers containers placed by a seeded permutation of the
/// filled slots, plus the incoming groups. Departures follow the schedule in
/// id order; incoming containers are drawn (seeded) among the ids departing
/// after their group arrives.
Instance generate(const GeneratorConfig& config);

/// "9@1,9@20" -> sizes {9,9}, starts {1,20}.
BatchedSchedule parse_batch_spec(const std::string& spec);

/// Two equal halves with a gap as long as the first batch plus one step,
/// e.g. 18 containers -> 9@1, 9@20.
BatchedSchedule default_batches(int containers);

}  // namespace yardcrp
