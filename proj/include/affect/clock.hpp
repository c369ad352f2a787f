#pragma once

#include <chrono>
#include <string>

namespace affect {

using WallTime = std::chrono::system_clock::time_point;

/// Source of wall-clock timestamps for events and blocks. Tests pin it.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual WallTime now() const = 0;
};

class SystemClock final : public Clock {
 public:
  WallTime now() const override { return std::chrono::system_clock::now(); }
};

class FixedClock final : public Clock {
 public:
  explicit FixedClock(WallTime t) : t_(t) {}
  WallTime now() const override { return t_; }

 private:
  WallTime t_;
};

/// UTC, microsecond precision: 2024-05-01T12:00:00.000000Z
std::string format_iso8601(WallTime t);

}  // namespace affect
