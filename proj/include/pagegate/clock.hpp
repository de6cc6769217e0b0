#pragma once

#include <atomic>
#include <cstdint>

namespace pagegate {

// Milliseconds since the Unix epoch.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() const override;
};

// Test and replay clock: only moves when told to.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::int64_t start = 0) : now_(start) {}
    std::int64_t now_ms() const override { return now_.load(); }
    void set(std::int64_t ms) { now_.store(ms); }
    void advance(std::int64_t ms) { now_.fetch_add(ms); }

private:
    std::atomic<std::int64_t> now_;
};

} // namespace pagegate
