#include "pbo/service/session_store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "pbo/common/errors.hpp"
#include "pbo/sim/json.hpp"

namespace pbo::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(SessionState s) {
  switch (s) {
    case SessionState::AwaitingChoice: return "AwaitingChoice";
    case SessionState::Proposing: return "Proposing";
    case SessionState::RunningTrials: return "RunningTrials";
    case SessionState::Finished: return "Finished";
  }
  return "Unknown";
}

SessionState session_state_from_string(const std::string& s) {
  if (s == "AwaitingChoice") return SessionState::AwaitingChoice;
  if (s == "Proposing") return SessionState::Proposing;
  if (s == "RunningTrials") return SessionState::RunningTrials;
  if (s == "Finished") return SessionState::Finished;
  throw MalformedInput("unknown session state '" + s + "'");
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Session::Session(std::string id, loop::RunConfig config, std::string created)
    : id_(std::move(id)), loop_(std::move(config)), created_(std::move(created)), updated_(created_) {
  state_ = loop_.finished() ? SessionState::Finished : SessionState::AwaitingChoice;
}

json Session::duel_payload() const {
  if (loop_.finished()) throw ServiceError(409, "session is finished", {{"state", "Finished"}, {"summary", summary()}});
  const loop::PendingDuel& p = loop_.pending();
  return json{{"index", p.index + 1},          {"total", loop_.total()},
              {"first", p.first},              {"second", p.second},
              {"params_first", p.first.params}, {"params_second", p.second.params}};
}

json Session::summary() const {
  return json{{"incumbent", loop_.incumbent()},
              {"trajectory", loop_.incumbent_trajectory()},
              {"resolved", loop_.resolved()},
              {"total", loop_.total()}};
}

void Session::check_choice(int duel_index) const {
  if (state_ == SessionState::Finished) {
    throw ServiceError(409, "session is finished", {{"state", "Finished"}, {"summary", summary()}});
  }
  const int pending = loop_.resolved() + 1;
  if (duel_index != pending) {
    throw ServiceError(409, "stale duel index " + std::to_string(duel_index) + "; pending duel is " +
                                std::to_string(pending),
                       {{"pending_index", pending}});
  }
}

void Session::apply(const ChoiceRecord& choice, const std::string& now) {
  state_ = SessionState::Proposing;
  choices_.push_back(choice);
  loop_.resolve(choice.first_wins);
  state_ = loop_.finished() ? SessionState::Finished : SessionState::AwaitingChoice;
  updated_ = now;
}

namespace {

json choices_json(const std::vector<ChoiceRecord>& choices) {
  json out = json::array();
  for (const auto& c : choices) out.push_back({{"duel_index", c.duel_index}, {"winner", c.first_wins ? "first" : "second"}});
  return out;
}

bool parse_winner(const std::string& w) {
  if (w == "first") return true;
  if (w == "second") return false;
  throw ServiceError(400, "winner must be \"first\" or \"second\"");
}

}  // namespace

json Session::persisted() const {
  return json{{"id", id_},
              {"config", loop_.config()},
              {"choices", choices_json(choices_)},
              {"state", to_string(state_)},
              {"created", created_},
              {"updated", updated_}};
}

std::unique_ptr<Session> Session::restore(const json& j) {
  try {
    auto s = std::make_unique<Session>(j.at("id").get<std::string>(), j.at("config").get<loop::RunConfig>(),
                                       j.at("created").get<std::string>());
    for (const auto& c : j.at("choices")) {
      const ChoiceRecord choice{c.at("duel_index").get<int>(), parse_winner(c.at("winner").get<std::string>())};
      s->check_choice(choice.duel_index);
      s->apply(choice, j.at("updated").get<std::string>());
    }
    s->updated_ = j.at("updated").get<std::string>();
    return s;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("session file: ") + e.what());
  } catch (const ServiceError& e) {
    throw MalformedInput(std::string("session file: ") + e.what());
  }
}

json Session::archive() const {
  json j = persisted();
  j["record"] = loop::record_to_json(loop_.record());
  j["pending"] = loop_.finished() ? json(nullptr) : duel_payload();
  j["model"] = loop_.model() ? json(*loop_.model()) : json(nullptr);
  return j;
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path SessionStore::path_of(const std::string& id) const { return root_ / (id + ".json"); }

// Write to a temporary file and rename over the old one.
void SessionStore::write(const std::string& id, const json& contents) const {
  const fs::path tmp = root_ / (id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << contents.dump(2) << '\n';
    out.flush();
    if (!out) throw ServiceError(500, "could not write session file " + tmp.string());
  }
  fs::rename(tmp, path_of(id));
}

std::string SessionStore::new_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  for (;;) {
    std::ostringstream os;
    os << std::hex << gen();
    std::string id = os.str();
    std::lock_guard lock(mutex_);
    if (!slots_.count(id) && !fs::exists(path_of(id))) return id;
  }
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) {
  const bool safe = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
  if (!safe) throw ServiceError(404, "unknown session '" + id + "'");
  std::lock_guard lock(mutex_);
  auto it = slots_.find(id);
  if (it != slots_.end()) return it->second;
  if (!fs::exists(path_of(id))) throw ServiceError(404, "unknown session '" + id + "'");
  auto s = std::make_shared<Slot>();
  slots_.emplace(id, s);
  return s;
}

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw MalformedInput("cannot read " + p.string());
  return json::parse(in);
}

}  // namespace

template <class F>
auto SessionStore::with_session(const std::string& id, F&& f) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (!s->session) s->session = Session::restore(read_json(path_of(id)));
  return f(*s->session);
}

json SessionStore::create(const json& body) {
  json merged = loop::RunConfig::human_session();
  if (!body.is_null()) {
    if (!body.is_object()) throw ServiceError(400, "run config must be a JSON object");
    merged.merge_patch(body);
  }
  loop::RunConfig config;
  try {
    config = merged.get<loop::RunConfig>();
    loop::validate(config);
  } catch (const MalformedInput& e) {
    throw ServiceError(400, e.what());
  }
  if (!acq::is_dueling_strategy(config.strategy)) {
    throw ServiceError(400, "strategy: '" + config.strategy + "' is not a dueling strategy");
  }
  const std::string id = new_id();
  auto s = std::make_shared<Slot>();
  s->session = std::make_unique<Session>(id, std::move(config), utc_now());
  std::lock_guard slot_lock(s->mutex);
  {
    std::lock_guard lock(mutex_);
    slots_.emplace(id, s);
  }
  write(id, s->session->persisted());
  return json{{"id", id}, {"duel", s->session->duel_payload()}};
}

json SessionStore::duel(const std::string& id) {
  return with_session(id, [](Session& s) { return s.duel_payload(); });
}

json SessionStore::choose(const std::string& id, int duel_index, const std::string& winner) {
  const bool first_wins = parse_winner(winner);
  return with_session(id, [&](Session& session) {
    session.check_choice(duel_index);
    const std::string now = utc_now();
    // Write-ahead: the choice reaches disk before the model is refitted.
    json ahead = session.persisted();
    ahead["choices"].push_back({{"duel_index", duel_index}, {"winner", winner}});
    ahead["state"] = to_string(SessionState::Proposing);
    ahead["updated"] = now;
    write(id, ahead);
    session.apply({duel_index, first_wins}, now);
    write(id, session.persisted());
    if (session.state() == SessionState::Finished) {
      return json{{"state", "Finished"}, {"summary", session.summary()}};
    }
    return json{{"state", to_string(session.state())}, {"duel", session.duel_payload()}};
  });
}

json SessionStore::export_session(const std::string& id) {
  return with_session(id, [](Session& s) { return s.archive(); });
}

json SessionStore::list() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root_)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  json out = json::array();
  for (const auto& f : files) {
    try {
      const json j = read_json(f);
      const json& cfg = j.at("config");
      out.push_back({{"id", j.at("id")},
                     {"state", j.at("state")},
                     {"strategy", cfg.at("strategy")},
                     {"resolved", j.at("choices").size()},
                     {"total", cfg.at("n_initial").get<int>() + cfg.at("n_iterations").get<int>()},
                     {"created", j.at("created")},
                     {"updated", j.at("updated")}});
    } catch (const std::exception&) {
      // Not a session file; skip.
    }
  }
  return out;
}

}  // namespace pbo::service
