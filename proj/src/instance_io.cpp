#include "yardcrp/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace yardcrp {

using nlohmann::json;

namespace {

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ParseError(field + ": " + what, 0, field); }

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(field, "out of range");
  return static_cast<int>(v);
}

Rational as_rational(const json& j, const std::string& field) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number()) return Rational::parse(j.dump());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  fail(field, "expected a number or \"p/q\"");
}

json weight_json(const Rational& r) {
  if (r.den() == 1) return r.num();
  return r.str();
}

ContainerSpec parse_container(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  static const std::vector<std::string> known = {"id", "slot", "departure", "delta", "arrival", "alpha", "label"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(where + "." + key, "unknown field");
  }
  ContainerSpec c;
  if (!j.contains("id")) fail(where + ".id", "missing");
  c.id = as_int(j["id"], where + ".id");

  if (!j.contains("slot")) fail(where + ".slot", "missing");
  const json& slot = j["slot"];
  if (slot.is_string()) {
    if (slot.get<std::string>() != "incoming") fail(where + ".slot", "expected [column, tier] or \"incoming\"");
  } else if (slot.is_array() && slot.size() == 2) {
    c.initial = Slot{as_int(slot[0], where + ".slot[0]"), as_int(slot[1], where + ".slot[1]")};
  } else {
    fail(where + ".slot", "expected [column, tier] or \"incoming\"");
  }

  if (!j.contains("departure")) fail(where + ".departure", "missing");
  const json& dep = j["departure"];
  if (dep.is_string()) {
    if (dep.get<std::string>() != "inf") fail(where + ".departure", "expected an integer or \"inf\"");
    c.departure = kInfiniteTime;
  } else {
    c.departure = as_int(dep, where + ".departure");
  }
  if (j.contains("delta")) c.retrieval_slack = as_int(j["delta"], where + ".delta");
  if (c.incoming()) {
    if (!j.contains("arrival")) fail(where + ".arrival", "incoming container needs an arrival time");
    c.arrival = as_int(j["arrival"], where + ".arrival");
    if (j.contains("alpha")) c.stacking_slack = as_int(j["alpha"], where + ".alpha");
  } else if (j.contains("arrival") || j.contains("alpha")) {
    fail(where, "arrival/alpha only apply to incoming containers");
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) fail(where + ".label", "expected a string");
    c.label = j["label"].get<std::string>();
  }
  return c;
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw ParseError("expected a JSON object", 1);
  static const std::vector<std::string> known = {"columns", "tiers", "flexibility", "weights", "containers"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown field");
  }

  Instance inst;
  if (!doc.contains("columns")) fail("columns", "missing");
  if (!doc.contains("tiers")) fail("tiers", "missing");
  inst.columns = as_int(doc["columns"], "columns");
  inst.tiers = as_int(doc["tiers"], "tiers");
  if (doc.contains("flexibility")) inst.flexibility = as_int(doc["flexibility"], "flexibility");
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    if (!w.is_object()) fail("weights", "expected an object");
    for (const auto& [key, value] : w.items()) {
      if (key == "rel") {
        inst.weights.rel = as_rational(value, "weights.rel");
      } else if (key == "ret") {
        inst.weights.ret = as_rational(value, "weights.ret");
      } else if (key == "stack") {
        inst.weights.stack = as_rational(value, "weights.stack");
      } else {
        fail("weights." + key, "unknown field");
      }
    }
  }
  if (doc.contains("containers")) {
    const json& list = doc["containers"];
    if (!list.is_array()) fail("containers", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i)
      inst.containers.push_back(parse_container(list[i], "containers[" + std::to_string(i) + "]"));
  }
  std::stable_sort(inst.containers.begin(), inst.containers.end(),
                   [](const ContainerSpec& a, const ContainerSpec& b) { return a.id < b.id; });

  auto report = validate_bay(inst);
  if (!report.ok()) throw SemanticError(std::move(report));
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"columns\": " << inst.columns << ",\n";
  out << "  \"tiers\": " << inst.tiers << ",\n";
  out << "  \"flexibility\": " << inst.flexibility << ",\n";
  const json weights = {{"rel", weight_json(inst.weights.rel)},
                        {"ret", weight_json(inst.weights.ret)},
                        {"stack", weight_json(inst.weights.stack)}};
  out << "  \"weights\": " << weights.dump() << ",\n";
  out << "  \"containers\": [";
  for (std::size_t i = 0; i < inst.containers.size(); ++i) {
    const auto& c = inst.containers[i];
    // Keys are written in a fixed, readable order.
    std::string line = "{\"id\": " + std::to_string(c.id);
    line += ", \"slot\": ";
    line += c.initial ? "[" + std::to_string(c.initial->column) + ", " + std::to_string(c.initial->tier) + "]"
                      : std::string("\"incoming\"");
    if (c.incoming()) line += ", \"arrival\": " + std::to_string(c.arrival);
    if (c.stacking_slack) line += ", \"alpha\": " + std::to_string(*c.stacking_slack);
    line += ", \"departure\": ";
    line += c.has_departure() ? std::to_string(c.departure) : std::string("\"inf\"");
    if (c.retrieval_slack) line += ", \"delta\": " + std::to_string(*c.retrieval_slack);
    if (!c.label.empty()) line += ", \"label\": " + json(c.label).dump();
    line += "}";
    out << (i == 0 ? "\n    " : ",\n    ") << line;
  }
  out << (inst.containers.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("error writing " + path);
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }
void save_instance(const std::string& path, const Instance& instance) { write_file(path, serialize_instance(instance)); }

// ---------------------------------------------------------------------------

namespace {

std::string slot_text(Slot s) { return "[" + std::to_string(s.column) + "," + std::to_string(s.tier) + "]"; }

std::string tag(const Instance& inst, ContainerId id) {
  const auto& c = inst.container(id);
  return "(c" + c.name() + "," + (c.has_departure() ? std::to_string(c.departure) : std::string("inf")) + ")";
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string serialize_moves(const Plan& plan, const Instance& inst) {
  std::string out;
  for (int t = 1; t <= plan.length(); ++t) {
    out += "t=" + std::to_string(t) + " ";
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Idle>) {
            out += "idle";
          } else if constexpr (std::is_same_v<T, Retrieve>) {
            out += "retrieve " + tag(inst, m.id) + ": " + slot_text(m.from) + " -> out";
          } else if constexpr (std::is_same_v<T, Stack>) {
            out += "stack " + tag(inst, m.id) + ": out -> " + slot_text(m.to);
          } else {
            out += "relocate " + tag(inst, m.id) + ": " + slot_text(m.from) + " -> " + slot_text(m.to);
          }
        },
        plan.at(t));
    out += "\n";
  }
  return out;
}

std::string metrics_line(const PlanMetrics& m) {
  return "relocations=" + std::to_string(m.relocations) + " total_delay=" + std::to_string(m.total_delay) +
         " objective=" + m.objective.str();
}

std::string serialize_plan(const Plan& plan, const Instance& inst, const PlanMetrics& metrics) {
  std::string out = serialize_moves(plan, inst);
  out += metrics_line(metrics) + "\n";
  out += "stacking_delay=" + std::to_string(metrics.total_stacking_delay) + "\n";
  out += "delays=" + join(metrics.retrieval_delay) + "\n";
  return out;
}

Plan parse_plan(const std::string& text, const Instance& inst) {
  std::map<std::string, ContainerId> by_name;
  for (const auto& c : inst.containers) by_name["c" + c.name()] = c.id;

  static const std::regex move_re(
      R"(^\s*t\s*=\s*(\d+)\s+(relocate|retrieve|stack|idle)\b\s*(?:\(\s*([^,\s)]+)\s*(?:,[^)]*)?\))?\s*:?\s*(.*)$)");
  static const std::regex slot_re(R"(\[\s*(\d+)\s*,\s*(\d+)\s*\])");

  Plan plan;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::smatch m;
    if (!std::regex_match(line, m, move_re)) continue;
    const int t = std::stoi(m[1]);
    if (t <= plan.length()) throw ParseError("time-step " + std::to_string(t) + " out of order", lineno);
    while (plan.length() < t - 1) plan.moves.emplace_back(Idle{});

    const std::string kind = m[2];
    if (kind == "idle") {
      plan.moves.emplace_back(Idle{});
      continue;
    }
    const std::string name = m[3];
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ParseError("unknown container '" + name + "'", lineno);
    const ContainerId id = it->second;

    std::vector<Slot> slots;
    const std::string rest = m[4];
    for (auto s = std::sregex_iterator(rest.begin(), rest.end(), slot_re); s != std::sregex_iterator(); ++s)
      slots.push_back({std::stoi((*s)[1]), std::stoi((*s)[2])});
    const auto expect = [&](std::size_t n) {
      if (slots.size() != n) throw ParseError(kind + " needs " + std::to_string(n) + " slot(s)", lineno);
    };
    if (kind == "retrieve") {
      expect(1);
      plan.moves.emplace_back(Retrieve{id, slots[0]});
    } else if (kind == "stack") {
      expect(1);
      plan.moves.emplace_back(Stack{id, slots[0]});
    } else {
      expect(2);
      plan.moves.emplace_back(Relocate{id, slots[0], slots[1]});
    }
  }
  return plan;
}

Plan load_plan(const std::string& path, const Instance& instance) { return parse_plan(read_file(path), instance); }

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<int> schedule_departures(const Schedule& schedule, int n) {
  std::vector<int> d;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformSchedule>) {
          for (int i = 1; i <= n; ++i) d.push_back(i);
        } else if constexpr (std::is_same_v<T, BatchedSchedule>) {
          for (std::size_t k = 0; k < s.sizes.size(); ++k) {
            for (int i = 0; i < s.sizes[k]; ++i) d.push_back(s.starts[k] + i);
          }
        } else {
          d = s.departures;
        }
      },
      schedule);
  return d;
}

int incoming_count(const GeneratorConfig& cfg) {
  return cfg.incoming ? std::accumulate(cfg.incoming->group_sizes.begin(), cfg.incoming->group_sizes.end(), 0) : 0;
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Xoshiro256::below(std::uint64_t bound) {
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x < limit) return x % bound;
  }
}

void validate_config(const GeneratorConfig& cfg) {
  if (cfg.columns < 1 || cfg.tiers < 1 || cfg.columns > kMaxColumns || cfg.tiers > kMaxTiers ||
      cfg.columns * cfg.tiers > kMaxSlots)
    throw ConfigInvalid("unsupported bay geometry");
  if (cfg.filled_tiers < 0 || cfg.filled_tiers >= cfg.tiers)
    throw ConfigInvalid("filled tiers must leave the top tier empty");
  if (cfg.flexibility < 0) throw ConfigInvalid("flexibility must be non-negative");
  const int in_bay = cfg.columns * cfg.filled_tiers;
  const int incoming = incoming_count(cfg);
  const int n = in_bay + incoming;
  if (n > kMaxContainers) throw ConfigInvalid("too many containers");
  if (n > cfg.columns * cfg.tiers) throw ConfigInvalid("containers do not fit in the bay");

  if (const auto* b = std::get_if<BatchedSchedule>(&cfg.schedule)) {
    if (b->sizes.size() != b->starts.size() || b->sizes.empty()) throw ConfigInvalid("batch sizes and starts differ");
    int end = 0;
    for (std::size_t k = 0; k < b->sizes.size(); ++k) {
      if (b->sizes[k] < 0) throw ConfigInvalid("negative batch size");
      if (b->starts[k] < 1 || b->starts[k] < end) throw ConfigInvalid("batch windows overlap");
      end = b->starts[k] + b->sizes[k];
    }
    if (std::accumulate(b->sizes.begin(), b->sizes.end(), 0) != n)
      throw ConfigInvalid("batch sizes must add up to " + std::to_string(n));
  } else if (const auto* e = std::get_if<ExplicitSchedule>(&cfg.schedule)) {
    if (static_cast<int>(e->departures.size()) != n)
      throw ConfigInvalid("explicit schedule needs " + std::to_string(n) + " departures");
    if (!std::is_sorted(e->departures.begin(), e->departures.end()) ||
        (!e->departures.empty() && e->departures.front() < 1))
      throw ConfigInvalid("explicit departures must be positive and nondecreasing");
  }
  if (cfg.incoming) {
    const auto& inc = *cfg.incoming;
    if (inc.group_sizes.size() != inc.group_arrivals.size()) throw ConfigInvalid("incoming sizes and arrivals differ");
    for (std::size_t g = 0; g < inc.group_sizes.size(); ++g) {
      if (inc.group_sizes[g] < 0 || inc.group_arrivals[g] < 1) throw ConfigInvalid("bad incoming group");
    }
    if (inc.stacking_slack && *inc.stacking_slack < 0) throw ConfigInvalid("negative stacking slack");
  }
  if (cfg.retrieval_slack && *cfg.retrieval_slack < 0) throw ConfigInvalid("negative retrieval slack");
}

Instance generate(const GeneratorConfig& cfg) {
  validate_config(cfg);
  Xoshiro256 rng(cfg.seed);
  const int in_bay = cfg.columns * cfg.filled_tiers;
  const int n = in_bay + incoming_count(cfg);
  const auto departures = schedule_departures(cfg.schedule, n);

  Instance inst;
  inst.columns = cfg.columns;
  inst.tiers = cfg.tiers;
  inst.flexibility = cfg.flexibility;
  inst.weights = cfg.weights;
  for (int id = 1; id <= n; ++id) {
    ContainerSpec c;
    c.id = id;
    c.departure = departures[static_cast<std::size_t>(id - 1)];
    if (c.has_departure()) c.retrieval_slack = cfg.retrieval_slack;
    inst.containers.push_back(c);
  }

  std::vector<bool> arriving(static_cast<std::size_t>(n + 1), false);
  if (cfg.incoming) {
    // Groups in arrival order; a container can only arrive before it departs.
    std::vector<std::size_t> order(cfg.incoming->group_sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cfg.incoming->group_arrivals[a] < cfg.incoming->group_arrivals[b];
    });
    for (std::size_t g : order) {
      const int arrival = cfg.incoming->group_arrivals[g];
      std::vector<int> eligible;
      for (int id = 1; id <= n; ++id) {
        if (!arriving[static_cast<std::size_t>(id)] && inst.container(id).departure > arrival) eligible.push_back(id);
      }
      const int want = cfg.incoming->group_sizes[g];
      if (static_cast<int>(eligible.size()) < want)
        throw ConfigInvalid("not enough containers depart after arrival time " + std::to_string(arrival));
      shuffle(eligible, rng);
      for (int k = 0; k < want; ++k) {
        auto& c = inst.container(eligible[static_cast<std::size_t>(k)]);
        arriving[static_cast<std::size_t>(c.id)] = true;
        c.arrival = arrival;
        c.stacking_slack = cfg.incoming->stacking_slack;
      }
    }
  }

  std::vector<Slot> slots;
  for (int col = 1; col <= cfg.columns; ++col) {
    for (int tier = 1; tier <= cfg.filled_tiers; ++tier) slots.push_back({col, tier});
  }
  shuffle(slots, rng);
  std::size_t next = 0;
  for (auto& c : inst.containers) {
    if (!arriving[static_cast<std::size_t>(c.id)]) c.initial = slots[next++];
  }

  const auto report = validate_bay(inst);
  if (!report.ok()) throw ConfigInvalid("generated bay is invalid: " + report.summary());
  return inst;
}

BatchedSchedule parse_batch_spec(const std::string& spec) {
  BatchedSchedule out;
  static const std::regex item(R"(^\s*(\d+)\s*@\s*(\d+)\s*$)");
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::smatch m;
    if (!std::regex_match(part, m, item)) throw ConfigInvalid("bad batch '" + part + "', expected SIZE@START");
    out.sizes.push_back(std::stoi(m[1]));
    out.starts.push_back(std::stoi(m[2]));
  }
  if (out.sizes.empty()) throw ConfigInvalid("empty batch spec");
  return out;
}

BatchedSchedule default_batches(int containers) {
  const int first = (containers + 1) / 2;
  return BatchedSchedule{{first, containers - first}, {1, 2 * first + 2}};
}

}  // namespace yardcrp
