#include "tulip/event_log.h"

#include "json.hpp"

namespace tulip {

std::string to_json_line(const RequestEvent& e) {
  nlohmann::json doc = {{"timestamp", e.timestamp},
                        {"route", e.route},
                        {"verdict", e.verdict},
                        {"reason", e.reason}};
  if (!e.ouid.empty()) doc["ouid"] = e.ouid;
  return doc.dump();
}

EventLog::EventLog(std::ostream* sink, std::size_t retain) : sink_(sink), retain_(retain) {}

void EventLog::record(RequestEvent event) {
  std::lock_guard lock(mu_);
  ++total_;
  if (observer_) observer_(event);
  if (sink_ != nullptr) *sink_ << to_json_line(event) << '\n' << std::flush;
  if (retain_ == 0) return;
  if (recent_.size() == retain_) recent_.pop_front();
  recent_.push_back(std::move(event));
}

void EventLog::set_observer(std::function<void(const RequestEvent&)> observer) {
  std::lock_guard lock(mu_);
  observer_ = std::move(observer);
}

std::vector<RequestEvent> EventLog::recent() const {
  std::lock_guard lock(mu_);
  return {recent_.begin(), recent_.end()};
}

std::size_t EventLog::total() const {
  std::lock_guard lock(mu_);
  return total_;
}

}  // namespace tulip
