#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nxtbdi/term.hpp"

namespace nxtbdi::bridge {

enum class Motor { a, b, c };
enum class Verb { forward, backward, rotate, reverse, speed, stop, block };
enum class PerceptKind { light, obstacle, touching, sound };

std::string_view wire_name(Verb v);
std::string_view wire_name(PerceptKind k);
char motor_letter(Motor m);

/// `A|<id>|<VERB>|<motors>|<args>`
struct ActionCommand {
  std::uint64_t id = 0;
  Verb verb = Verb::stop;
  std::vector<Motor> motors;
  std::vector<long long> args;

  friend bool operator==(const ActionCommand&, const ActionCommand&) = default;
};

/// `P|<KIND>|<port>|<value>`; touching carries 1/0 (printed true/false).
struct PerceptSample {
  PerceptKind kind = PerceptKind::light;
  int port = 1;
  long long value = 0;

  friend bool operator==(const PerceptSample&, const PerceptSample&) = default;
};

/// `K|<id>` or, when the brick rejected the command, `K|<id>|FAIL`.
struct Ack {
  std::uint64_t id = 0;
  bool ok = true;

  friend bool operator==(const Ack&, const Ack&) = default;
};

/// `X`
struct Exit {
  friend bool operator==(const Exit&, const Exit&) = default;
};

using WireMessage = std::variant<ActionCommand, PerceptSample, Ack, Exit>;

class WireFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedPercept : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One record, without the trailing newline.
std::string to_wire(const WireMessage& m);
WireMessage from_wire(std::string_view record);

/// True for functors the robot understands (forward, rotate, ..., exit).
bool is_robot_action(const Term& t);

/// Maps a ground action term to its wire command. Numbers are truncated.
WireMessage encode_action(const Term& t, std::uint64_t id);

/// `light(Port,Value)[source(percept)]` and friends. Validates ranges.
Term decode_percept(const PerceptSample& p);

/// Inverse of decode_percept for the four percept functors.
PerceptSample percept_from_term(const Term& t);

}  // namespace nxtbdi::bridge
