#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbo/loop/pbo_loop.hpp"
#include "pbo/loop/run_config.hpp"

namespace pbo::service {

enum class SessionState { AwaitingChoice, Proposing, RunningTrials, Finished };

std::string to_string(SessionState s);
SessionState session_state_from_string(const std::string& s);

// Error carrying an HTTP status and an optional JSON body to merge into the reply.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what, nlohmann::json extra = nlohmann::json::object())
      : std::runtime_error(what), status_(status), extra_(std::move(extra)) {}
  int status() const noexcept { return status_; }
  const nlohmann::json& extra() const noexcept { return extra_; }

 private:
  int status_;
  nlohmann::json extra_;
};

struct ChoiceRecord {
  int duel_index = 0;  // 1-based, as shown to the operator
  bool first_wins = true;
};

// One human-driven run. The persisted form is the config plus the ordered
// choices; the loop state is rebuilt by replaying them.
class Session {
 public:
  Session(std::string id, loop::RunConfig config, std::string created);

  const std::string& id() const { return id_; }
  SessionState state() const { return state_; }
  const loop::PboLoop& loop() const { return loop_; }
  const std::vector<ChoiceRecord>& choices() const { return choices_; }
  const std::string& created() const { return created_; }
  const std::string& updated() const { return updated_; }

  // {index, total, first, second, params_first, params_second}. Throws
  // ServiceError 409 when finished.
  nlohmann::json duel_payload() const;
  // {incumbent, trajectory, resolved, total}
  nlohmann::json summary() const;

  // Validates the choice against the pending duel without changing state.
  void check_choice(int duel_index) const;
  // Applies a choice that check_choice accepted.
  void apply(const ChoiceRecord& choice, const std::string& now);

  // File contents: {id, config, choices, state, created, updated}.
  nlohmann::json persisted() const;
  static std::unique_ptr<Session> restore(const nlohmann::json& j);
  // Archive: persisted fields plus the run record, pending duel and model.
  nlohmann::json archive() const;

 private:
  std::string id_;
  loop::PboLoop loop_;
  std::vector<ChoiceRecord> choices_;
  SessionState state_ = SessionState::AwaitingChoice;
  std::string created_;
  std::string updated_;
};

// Sessions under one data directory, one JSON file each. Operations on a
// session are serialized by a per-session mutex.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Body fields override the human-session defaults. Returns {id, duel}.
  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json duel(const std::string& id);
  // winner is "first" or "second". Returns {state, duel} or {state, summary}.
  nlohmann::json choose(const std::string& id, int duel_index, const std::string& winner);
  nlohmann::json export_session(const std::string& id);
  // [{id, state, strategy, resolved, total, created, updated}]
  nlohmann::json list();

 private:
  struct Slot {
    std::mutex mutex;
    std::unique_ptr<Session> session;
  };

  std::shared_ptr<Slot> slot(const std::string& id);
  std::filesystem::path path_of(const std::string& id) const;
  // Runs f with the session's mutex held, loading it from disk on first use.
  template <class F>
  auto with_session(const std::string& id, F&& f);
  void write(const std::string& id, const nlohmann::json& contents) const;
  std::string new_id();

  std::filesystem::path root_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

// Current UTC time as ISO-8601 with seconds.
std::string utc_now();

}  // namespace pbo::service
