#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nxtbdi/term.hpp"

namespace nxtbdi {

/// Standard NXT sensor kinds that can sit on ports 1-4.
enum class SensorKind { none, touch, light, sound, ultrasonic };

std::string_view to_string(SensorKind k);
std::optional<SensorKind> parse_sensor_kind(std::string_view name);

}  // namespace nxtbdi

namespace nxtbdi::asl {

class ProjectError : public std::runtime_error {
 public:
  ProjectError(std::string agent, std::string field, const std::string& what);

  const std::string& agent() const { return agent_; }
  const std::string& field() const { return field_; }

 private:
  std::string agent_;
  std::string field_;
};

struct AgentConfig {
  std::string name;
  std::string source_path;
  std::string btname;
  std::string btaddress;
  /// Connected motors, indexed A, B, C.
  std::array<bool, 3> motors{};
  /// Sensor per port, index 0 is port 1.
  std::array<SensorKind, 4> sensors{SensorKind::none, SensorKind::none,
                                    SensorKind::none, SensorKind::none};
  int sleep_ms = 50;
  std::string arch_class;
  std::string belief_base_class;
  /// Uniqueness patterns such as `light(port,_)`.
  std::vector<Term> unique_patterns;

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

struct ProjectConfig {
  std::vector<AgentConfig> agents;
};

/// Parses one or more agent blocks:
///
///     name source.asl [btname="..", btaddress="..", motora="true", ...]
///         agentArchClass some.Class
///         beliefBaseClass some.BB("light(port,_)", ...);
ProjectConfig parse_project_file(std::string_view source);

bool valid_btaddress(std::string_view addr);

}  // namespace nxtbdi::asl
