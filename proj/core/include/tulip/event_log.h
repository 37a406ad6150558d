#ifndef TULIP_EVENT_LOG_H_
#define TULIP_EVENT_LOG_H_

#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <deque>
#include <vector>

#include "tulip/clock.h"

namespace tulip {

// One record per request. Reason classes live here and nowhere in responses;
// repeated gate rejections for one user are an indicator of stolen
// credentials.
struct RequestEvent {
  UnixTime timestamp = 0;
  std::string route;
  std::string verdict;
  std::string reason;
  std::string ouid;
};

std::string to_json_line(const RequestEvent& event);

class EventLog {
 public:
  // Writes JSON lines to `sink` when given; keeps the last `retain` events
  // in memory for inspection.
  explicit EventLog(std::ostream* sink = nullptr, std::size_t retain = 4096);

  void record(RequestEvent event);
  // Called synchronously for every recorded event.
  void set_observer(std::function<void(const RequestEvent&)> observer);
  std::vector<RequestEvent> recent() const;
  std::size_t total() const;

 private:
  mutable std::mutex mu_;
  std::ostream* sink_;
  std::size_t retain_;
  std::deque<RequestEvent> recent_;
  std::size_t total_ = 0;
  std::function<void(const RequestEvent&)> observer_;
};

}  // namespace tulip

#endif  // TULIP_EVENT_LOG_H_
