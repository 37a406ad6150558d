#ifndef TULIP_CLOCK_H_
#define TULIP_CLOCK_H_

#include <atomic>
#include <cstdint>

namespace tulip {

// Seconds since the Unix epoch, UTC.
using UnixTime = std::int64_t;

// Every component takes its time from an injected clock; nothing reads the
// wall clock directly.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual UnixTime now() const = 0;
};

class SystemClock final : public Clock {
 public:
  UnixTime now() const override;
};

// Settable clock for tests and the simulation harness.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(UnixTime start = 0) : now_(start) {}

  UnixTime now() const override { return now_.load(); }
  void set(UnixTime t) { now_.store(t); }
  void advance(std::int64_t seconds) { now_.fetch_add(seconds); }

 private:
  std::atomic<UnixTime> now_;
};

}  // namespace tulip

#endif  // TULIP_CLOCK_H_
