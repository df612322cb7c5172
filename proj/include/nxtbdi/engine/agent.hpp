#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nxtbdi/asl/program.hpp"
#include "nxtbdi/belief_base.hpp"
#include "nxtbdi/bridge/endpoint.hpp"
#include "nxtbdi/engine/messaging.hpp"

namespace nxtbdi::engine {

using IntentionId = std::uint64_t;

struct Event {
  asl::TriggerEvent trigger;
  /// "percept", "self" or the sending agent's name.
  std::string source = "self";
  std::optional<IntentionId> intention;
  std::uint64_t origin_seq = 0;
};

struct Frame {
  asl::Plan plan;
  Substitution unifier;
  std::size_t pc = 0;
  /// The instantiated event that selected this plan.
  asl::TriggerEvent trigger;
};

enum class IntentionStatus { active, waiting, awaiting_subgoal, awaiting_ack };

struct Intention {
  IntentionId id = 0;
  std::vector<Frame> stack;
  IntentionStatus status = IntentionStatus::active;
  std::optional<asl::TriggerEvent> wait_pattern;
  std::uint64_t wait_cycle = 0;
  std::size_t wait_from = 0;
  std::uint64_t pending_action = 0;
  std::uint64_t origin_seq = 0;
};

enum class StepResult { executed, suspended, failed, finished };

struct CycleReport {
  std::uint64_t cycle = 0;
  std::size_t events = 0;
  std::size_t steps = 0;
  std::size_t percepts = 0;
  std::size_t messages = 0;
  bool percept_queue_empty = true;
  std::size_t actions = 0;
  std::size_t acks = 0;
  std::size_t internal_sent = 0;
  /// Ordered key=value annotations: event=, plan=, step=, send=, recv=, ...
  std::vector<std::pair<std::string, std::string>> notes;
};

struct AgentOptions {
  std::size_t max_depth = 256;
  /// Robot name used in instrumentation notes.
  std::string robot;
};

/// One AgentSpeak agent: belief base, plan library, event queue, intentions
/// and mailbox. Not thread-safe except for the mailbox.
class Agent {
 public:
  Agent(std::string name, const asl::AgentProgram& program,
        std::vector<UniquenessPattern> patterns,
        bridge::BridgeEndpoint* bridge, MessageRouter* router,
        AgentOptions options = {});

  const std::string& name() const { return name_; }

  /// perceive, read mail, handle one event, run one step, wake waiters.
  CycleReport reasoning_cycle();

  /// Whether a cycle may run now: async always; sync only with a queued
  /// percept and no action awaiting acknowledgement.
  bool ready();
  bool halted() const { return halted_; }

  std::optional<Event> select_event();
  std::vector<std::pair<asl::Plan, Substitution>> applicable_plans(
      const Event& e) const;
  StepResult execute_step(Intention& i);

  void post_event(Event e);
  /// Applies changes to the event queue (relevant triggers only) and to the
  /// per-cycle change log used by `.wait`.
  void emit_changes(const std::vector<BeliefChange>& changes,
                    const std::string& source, std::uint64_t origin_seq);

  struct Candidate {
    std::size_t index;
    asl::Plan plan;
    Substitution unifier;
  };
  /// Applicable plans for `e` in source order, renamed apart.
  std::vector<Candidate> candidates(const Event& e, bool first_only) const;

  BeliefBase& beliefs() { return beliefs_; }
  const BeliefBase& beliefs() const { return beliefs_; }
  const std::vector<asl::Plan>& plans() const { return plans_; }
  const std::deque<Event>& events() const { return events_; }
  const std::list<Intention>& intentions() const { return intentions_; }
  Mailbox& mailbox() { return mailbox_; }
  std::uint64_t cycle() const { return cycle_; }

  /// Called at the end of every cycle with the finished report.
  void set_cycle_hook(std::function<void(const Agent&, CycleReport&)> hook) {
    hook_ = std::move(hook);
  }

 private:
  Intention* find_intention(IntentionId id);
  Intention& new_intention(std::uint64_t origin_seq);
  void remove_intention(IntentionId id);
  bool relevant(const asl::TriggerEvent& t) const;
  void handle_event(Event e);
  void fail(Intention& i, const std::string& why);
  void pop_finished(Intention& i);
  Intention* next_active();
  void resolve_acks();
  void ingest_percepts();
  void ingest_mail();
  void wake_waiters();
  StepResult internal_action(Intention& i, const Term& call);
  void note(std::string key, std::string value);

  std::string name_;
  std::vector<asl::Plan> plans_;
  BeliefBase beliefs_;
  bridge::BridgeEndpoint* bridge_;
  MessageRouter* router_;
  AgentOptions options_;
  Mailbox mailbox_;

  std::deque<Event> events_;
  std::list<Intention> intentions_;
  IntentionId next_intention_ = 1;
  IntentionId last_run_ = 0;
  std::uint64_t cycle_ = 0;
  mutable std::uint64_t rename_ = 0;
  bool halted_ = false;

  std::vector<BeliefChange> cycle_changes_;
  CycleReport report_;
  std::function<void(const Agent&, CycleReport&)> hook_;
};

}  // namespace nxtbdi::engine
