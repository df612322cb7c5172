#include "nxtbdi/engine/agent.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "nxtbdi/asl/parser.hpp"

namespace nxtbdi::engine {

using asl::BodyStep;
using asl::Formula;
using asl::GoalKind;
using asl::Polarity;
using asl::StepKind;
using asl::TriggerEvent;

namespace {

class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Term source_annotation(const std::string& who) {
  return Term::structure("source", {Term::atom(who)});
}

bool has_source(const Term& t) {
  return std::any_of(t.annotations().begin(), t.annotations().end(),
                     [](const Term& a) {
                       return a.is_structure() && a.name() == "source";
                     });
}

Term with_source(Term t, const std::string& who) {
  if (!has_source(t)) t.annotate(source_annotation(who));
  return t;
}

bool same_predicate(const Term& a, const Term& b) {
  return a.is_literal() && b.is_literal() && a.name() == b.name() &&
         a.arity() == b.arity();
}

bool is_goal_add(const TriggerEvent& t) {
  return t.kind == GoalKind::achieve && t.polarity == Polarity::add;
}

bool is_goal_failure(const TriggerEvent& t) {
  return t.kind == GoalKind::achieve && t.polarity == Polarity::remove;
}

bool contains_term(const std::vector<Term>& set, const Term& t) {
  return std::any_of(set.begin(), set.end(), [&](const Term& b) {
    return equal_annotation_sets(b, t);
  });
}

TriggerEvent belief_trigger(const BeliefChange& c) {
  return {c.kind == BeliefChange::Kind::add ? Polarity::add : Polarity::remove,
          GoalKind::belief, c.belief};
}

}  // namespace

Agent::Agent(std::string name, const asl::AgentProgram& program,
             std::vector<UniquenessPattern> patterns,
             bridge::BridgeEndpoint* bridge, MessageRouter* router,
             AgentOptions options)
    : name_(std::move(name)),
      plans_(program.plans),
      beliefs_(std::move(patterns), options.max_depth),
      bridge_(bridge),
      router_(router),
      options_(std::move(options)) {
  for (const auto& r : program.rules) beliefs_.add_rule(r);
  for (const auto& b : program.beliefs) beliefs_.add(with_source(b, "self"));
  for (const auto& g : program.goals)
    post_event({{Polarity::add, GoalKind::achieve, g}, "self", {}, 0});
  if (router_) router_->register_agent(name_, mailbox_);
}

void Agent::note(std::string key, std::string value) {
  report_.notes.emplace_back(std::move(key), std::move(value));
}

bool Agent::ready() {
  if (halted_) return false;
  if (!bridge_) return true;
  return bridge_->ready();
}

// ---------------------------------------------------------------------------
// events

bool Agent::relevant(const TriggerEvent& t) const {
  if (t.kind == GoalKind::achieve) return true;
  return std::any_of(plans_.begin(), plans_.end(), [&](const asl::Plan& p) {
    return p.trigger.kind == t.kind && p.trigger.polarity == t.polarity &&
           same_predicate(p.trigger.term, t.term);
  });
}

void Agent::post_event(Event e) { events_.push_back(std::move(e)); }

void Agent::emit_changes(const std::vector<BeliefChange>& changes,
                         const std::string& source, std::uint64_t origin_seq) {
  for (const auto& c : changes) {
    cycle_changes_.push_back(c);
    auto trig = belief_trigger(c);
    if (relevant(trig)) post_event({std::move(trig), source, {}, origin_seq});
  }
}

std::optional<Event> Agent::select_event() {
  if (events_.empty()) return std::nullopt;
  Event e = std::move(events_.front());
  events_.pop_front();
  return e;
}

std::vector<Agent::Candidate> Agent::candidates(const Event& e,
                                                bool first_only) const {
  std::vector<Candidate> out;
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    const auto& plan = plans_[k];
    if (plan.trigger.kind != e.trigger.kind ||
        plan.trigger.polarity != e.trigger.polarity ||
        !same_predicate(plan.trigger.term, e.trigger.term))
      continue;
    asl::Plan renamed = asl::rename_vars(plan, "p" + std::to_string(++rename_));
    auto s = unify(renamed.trigger.term, e.trigger.term);
    if (!s) continue;
    s = unify_annotations(renamed.trigger.term, e.trigger.term, *s);
    if (!s) continue;
    if (renamed.context) {
      try {
        s = beliefs_.query_first(*renamed.context, *s);
      } catch (const EvalError& err) {
        spdlog::debug("{}: context of plan {} not evaluable: {}", name_, k,
                      err.what());
        s.reset();
      }
      if (!s) continue;
    }
    out.push_back({k, std::move(renamed), std::move(*s)});
    if (first_only) break;
  }
  return out;
}

std::vector<std::pair<asl::Plan, Substitution>> Agent::applicable_plans(
    const Event& e) const {
  std::vector<std::pair<asl::Plan, Substitution>> out;
  for (auto& c : candidates(e, false))
    out.emplace_back(std::move(c.plan), std::move(c.unifier));
  return out;
}

// ---------------------------------------------------------------------------
// intentions

Intention* Agent::find_intention(IntentionId id) {
  for (auto& i : intentions_)
    if (i.id == id) return &i;
  return nullptr;
}

Intention& Agent::new_intention(std::uint64_t origin_seq) {
  Intention i;
  i.id = next_intention_++;
  i.origin_seq = origin_seq;
  intentions_.push_back(std::move(i));
  return intentions_.back();
}

void Agent::remove_intention(IntentionId id) {
  intentions_.remove_if([&](const Intention& i) { return i.id == id; });
}

void Agent::handle_event(Event e) {
  ++report_.events;
  note("event", asl::to_string(e.trigger));

  Intention* linked = nullptr;
  if (e.intention) {
    linked = find_intention(*e.intention);
    if (!linked) return;
  }

  auto found = candidates(e, true);
  if (!found.empty()) {
    auto& c = found.front();
    note("plan", asl::to_string(plans_[c.index].trigger));
    Intention& i = linked ? *linked : new_intention(e.origin_seq);
    i.stack.push_back({std::move(c.plan), std::move(c.unifier), 0, e.trigger});
    i.status = IntentionStatus::active;
    pop_finished(i);
    return;
  }

  if (is_goal_add(e.trigger)) {
    spdlog::debug("{}: no applicable plan for {}", name_,
                  asl::to_string(e.trigger));
    note("noplan", asl::to_string(e.trigger));
    Event failure{{Polarity::remove, GoalKind::achieve,
                   e.trigger.term.without_annotations()},
                  "self",
                  e.intention,
                  linked ? linked->origin_seq : e.origin_seq};
    post_event(std::move(failure));
  } else if (is_goal_failure(e.trigger)) {
    spdlog::warn("{}: no plan handles {}; dropping intention", name_,
                 asl::to_string(e.trigger));
    if (linked) remove_intention(linked->id);
  }
}

void Agent::fail(Intention& i, const std::string& why) {
  note("fail", why);
  auto& st = i.stack;
  std::optional<std::size_t> goal_frame;
  for (std::size_t k = st.size(); k-- > 0;) {
    if (is_goal_failure(st[k].trigger)) break;
    if (is_goal_add(st[k].trigger)) {
      goal_frame = k;
      break;
    }
  }
  if (!goal_frame) {
    spdlog::warn("{}: step failed ({}); no goal to recover, dropping intention",
                 name_, why);
    remove_intention(i.id);
    return;
  }
  spdlog::debug("{}: step failed ({})", name_, why);
  Term goal = st[*goal_frame].trigger.term.without_annotations();
  st.erase(st.begin() + static_cast<std::ptrdiff_t>(*goal_frame), st.end());
  i.status = IntentionStatus::awaiting_subgoal;
  post_event({{Polarity::remove, GoalKind::achieve, goal},
              "self",
              i.id,
              i.origin_seq});
}

void Agent::pop_finished(Intention& i) {
  while (!i.stack.empty() && i.stack.back().pc >= i.stack.back().plan.body.size()) {
    Frame done = std::move(i.stack.back());
    i.stack.pop_back();
    if (i.stack.empty()) break;
    Frame& caller = i.stack.back();
    if (is_goal_add(done.trigger) && caller.pc > 0) {
      const BodyStep& call = caller.plan.body[caller.pc - 1];
      if (call.kind == StepKind::achieve) {
        auto s = unify(call.term, done.unifier.apply(done.plan.trigger.term),
                       caller.unifier);
        if (s) caller.unifier = std::move(*s);
      }
    }
  }
  if (i.stack.empty() && i.status == IntentionStatus::active)
    remove_intention(i.id);
}

Intention* Agent::next_active() {
  Intention* wrap = nullptr;
  for (auto& i : intentions_) {
    if (i.status != IntentionStatus::active || i.stack.empty()) continue;
    if (i.id > last_run_) return &i;
    if (!wrap) wrap = &i;
  }
  return wrap;
}

// ---------------------------------------------------------------------------
// steps

StepResult Agent::execute_step(Intention& i) {
  if (i.stack.empty()) {
    remove_intention(i.id);
    return StepResult::finished;
  }
  Frame& f = i.stack.back();
  if (f.pc >= f.plan.body.size()) {
    pop_finished(i);
    return StepResult::finished;
  }
  const BodyStep& step = f.plan.body[f.pc++];
  Term t = f.unifier.apply(step.term);
  note("step", asl::to_string(BodyStep{step.kind, t, step.op,
                                       f.unifier.apply(step.rhs)}));

  StepResult result = StepResult::executed;
  try {
    switch (step.kind) {
      case StepKind::action: {
        if (!bridge_) throw StepFailure("no robot attached for " + to_string(t));
        if (!bridge::is_robot_action(t))
          throw StepFailure("unknown action " + to_string(t));
        std::uint64_t id = 0;
        try {
          id = bridge_->act(t);
        } catch (const std::exception& e) {
          throw StepFailure(e.what());
        }
        ++report_.actions;
        if (id == 0) {
          halted_ = true;
        } else if (bridge_->mode() == bridge::Mode::sync) {
          i.status = IntentionStatus::awaiting_ack;
          i.pending_action = id;
          result = StepResult::suspended;
        }
        break;
      }
      case StepKind::internal_action:
        result = internal_action(i, t);
        break;
      case StepKind::achieve:
        post_event({{Polarity::add, GoalKind::achieve, t}, "self", i.id,
                    i.origin_seq});
        i.status = IntentionStatus::awaiting_subgoal;
        result = StepResult::suspended;
        break;
      case StepKind::achieve_async:
        post_event({{Polarity::add, GoalKind::achieve, t}, "self", {},
                    i.origin_seq});
        break;
      case StepKind::test: {
        auto r = beliefs_.query_first(Formula::literal(step.term), f.unifier);
        if (!r) throw StepFailure("test goal ?" + to_string(t) + " failed");
        f.unifier = std::move(*r);
        break;
      }
      case StepKind::add_belief:
        if (!t.is_ground())
          throw StepFailure("cannot add non-ground belief " + to_string(t));
        emit_changes(beliefs_.add(with_source(t, "self")), "self",
                     i.origin_seq);
        break;
      case StepKind::remove_belief:
        if (auto removed = beliefs_.remove(t))
          emit_changes({{BeliefChange::Kind::remove, *removed}}, "self",
                       i.origin_seq);
        break;
      case StepKind::replace_belief: {
        if (!t.is_ground())
          throw StepFailure("cannot add non-ground belief " + to_string(t));
        std::vector<BeliefChange> changes;
        std::vector<Term> old;
        for (const auto& b : beliefs_.beliefs())
          if (same_predicate(b, t)) old.push_back(b);
        for (const auto& b : old)
          if (auto removed = beliefs_.remove(b))
            changes.push_back({BeliefChange::Kind::remove, *removed});
        for (auto& c : beliefs_.add(with_source(t, "self")))
          changes.push_back(std::move(c));
        emit_changes(changes, "self", i.origin_seq);
        break;
      }
      case StepKind::relation: {
        auto r = eval_relation(step.op, step.term, step.rhs, f.unifier);
        if (!r)
          throw StepFailure(to_string(t) + " " +
                            std::string(nxtbdi::to_string(step.op)) + " " +
                            to_string(f.unifier.apply(step.rhs)) +
                            " does not hold");
        f.unifier = std::move(*r);
        break;
      }
    }
  } catch (const StepFailure& e) {
    fail(i, e.what());
    return StepResult::failed;
  } catch (const EvalError& e) {
    fail(i, e.what());
    return StepResult::failed;
  }

  if (result == StepResult::executed) {
    IntentionId id = i.id;
    pop_finished(i);
    if (!find_intention(id)) return StepResult::finished;
  }
  return result;
}

StepResult Agent::internal_action(Intention& i, const Term& call) {
  const std::string& fn = call.name();
  const auto& args = call.args();
  if (fn == ".send") {
    if (args.size() != 3 || !args[0].is_atom() || !args[1].is_atom())
      throw StepFailure("usage: .send(receiver, tell, content)");
    if (args[1].name() == "tellHow")
      throw StepFailure(".send with tellHow is not supported");
    if (args[1].name() != "tell")
      throw StepFailure("unsupported performative " + args[1].name());
    if (!args[2].is_ground() || !args[2].is_literal())
      throw StepFailure("message content must be a ground literal: " +
                        to_string(args[2]));
    if (!router_) throw StepFailure("no message router");
    MessageEnvelope m{name_, args[0].name(), Performative::tell, args[2],
                      i.origin_seq};
    note("send", m.receiver + "|" + to_string(m.content) + "|" +
                     options_.robot + "#" + std::to_string(i.origin_seq));
    if (router_->deliver(std::move(m))) ++report_.internal_sent;
    return StepResult::executed;
  }
  if (fn == ".wait") {
    if (args.size() != 1 || !args[0].is_string())
      throw StepFailure("usage: .wait(\"+trigger\")");
    TriggerEvent pattern;
    try {
      pattern = asl::parse_trigger(args[0].name());
    } catch (const std::exception& e) {
      throw StepFailure(std::string("bad .wait pattern: ") + e.what());
    }
    i.status = IntentionStatus::waiting;
    i.wait_pattern = std::move(pattern);
    i.wait_cycle = cycle_;
    i.wait_from = cycle_changes_.size();
    return StepResult::suspended;
  }
  if (fn == ".drop_all_desires" && args.empty()) {
    events_.clear();
    IntentionId keep = i.id;
    intentions_.remove_if([&](const Intention& x) { return x.id != keep; });
    return StepResult::executed;
  }
  if (fn == ".abolish") {
    if (args.size() != 1 || !args[0].is_literal())
      throw StepFailure("usage: .abolish(pattern)");
    std::vector<BeliefChange> changes;
    for (const auto& b : beliefs_.beliefs())
      if (unify(args[0], b)) changes.push_back({BeliefChange::Kind::remove, b});
    beliefs_.abolish(args[0]);
    emit_changes(changes, "self", i.origin_seq);
    return StepResult::executed;
  }
  throw StepFailure("unknown internal action " + to_string(call));
}

// ---------------------------------------------------------------------------
// cycle phases

void Agent::resolve_acks() {
  if (!bridge_) return;
  std::vector<IntentionId> failed, resumed;
  for (auto& i : intentions_) {
    if (i.status != IntentionStatus::awaiting_ack) continue;
    switch (bridge_->ack_state(i.pending_action)) {
      case bridge::AckState::pending:
        continue;
      case bridge::AckState::ok:
      case bridge::AckState::unknown:
        i.status = IntentionStatus::active;
        resumed.push_back(i.id);
        break;
      case bridge::AckState::failed:
        failed.push_back(i.id);
        note("nack", std::to_string(i.pending_action));
        break;
      case bridge::AckState::timed_out:
        failed.push_back(i.id);
        note("timeout", std::to_string(i.pending_action));
        break;
    }
    bridge_->forget(i.pending_action);
  }
  for (auto id : failed) {
    Intention* i = find_intention(id);
    i->status = IntentionStatus::active;
    fail(*i, "robot did not complete the action");
  }
  for (auto id : resumed)
    if (Intention* i = find_intention(id)) pop_finished(*i);
}

void Agent::ingest_percepts() {
  if (!bridge_) return;
  report_.percept_queue_empty = bridge_->queued_percepts() == 0;
  std::vector<bridge::Percept> batch;
  try {
    batch = bridge_->perceive();
  } catch (const bridge::EndpointDown& e) {
    spdlog::info("{}: robot link down ({}), halting", name_, e.what());
    halted_ = true;
    return;
  }
  report_.percepts = batch.size();
  if (batch.empty()) return;

  // Only net changes across the batch become events; `.wait` sees them all.
  std::vector<Term> before = beliefs_.beliefs();
  std::vector<std::pair<BeliefChange, std::uint64_t>> raw;
  for (const auto& p : batch)
    for (auto& c : beliefs_.add(p.term)) raw.emplace_back(std::move(c), p.seq);
  const std::vector<Term>& after = beliefs_.beliefs();

  std::vector<Term> emitted;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const auto& [c, seq] = raw[k];
    cycle_changes_.push_back(c);
    bool net;
    if (c.kind == BeliefChange::Kind::remove) {
      net = contains_term(before, c.belief) && !contains_term(after, c.belief);
    } else {
      net = contains_term(after, c.belief) && !contains_term(before, c.belief);
      for (std::size_t j = k + 1; net && j < raw.size(); ++j)
        if (raw[j].first.kind == BeliefChange::Kind::add &&
            equal_annotation_sets(raw[j].first.belief, c.belief))
          net = false;
    }
    if (!net || contains_term(emitted, c.belief)) continue;
    emitted.push_back(c.belief);
    auto trig = belief_trigger(c);
    if (relevant(trig)) post_event({std::move(trig), "percept", {}, seq});
  }
}

void Agent::ingest_mail() {
  for (auto& m : mailbox_.drain()) {
    ++report_.messages;
    note("recv", m.sender + "|" + to_string(m.content));
    Term content = m.content;
    content.annotate(source_annotation(m.sender));
    emit_changes(beliefs_.add(content), m.sender, 0);
  }
}

void Agent::wake_waiters() {
  for (auto& i : intentions_) {
    if (i.status != IntentionStatus::waiting || !i.wait_pattern) continue;
    const TriggerEvent& p = *i.wait_pattern;
    if (p.kind != GoalKind::belief) continue;
    std::size_t from = i.wait_cycle == cycle_ ? i.wait_from : 0;
    for (std::size_t k = from; k < cycle_changes_.size(); ++k) {
      const auto& c = cycle_changes_[k];
      if ((c.kind == BeliefChange::Kind::add) != (p.polarity == Polarity::add))
        continue;
      auto s = unify(p.term, c.belief);
      if (s && unify_annotations(p.term, c.belief, *s)) {
        i.status = IntentionStatus::active;
        i.wait_pattern.reset();
        note("wake", std::to_string(i.id));
        break;
      }
    }
  }
}

CycleReport Agent::reasoning_cycle() {
  report_ = CycleReport{};
  report_.cycle = ++cycle_;
  cycle_changes_.clear();
  if (halted_) return report_;

  resolve_acks();
  ingest_percepts();
  ingest_mail();
  if (auto e = select_event()) handle_event(std::move(*e));
  if (Intention* i = next_active()) {
    last_run_ = i->id;
    ++report_.steps;
    execute_step(*i);
  }
  wake_waiters();
  if (bridge_) report_.acks = bridge_->take_acks_received();
  if (hook_) hook_(*this, report_);
  return std::move(report_);
}

}  // namespace nxtbdi::engine
