#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gridflow/des/fault.hpp"

namespace gridflow::des {

/// Simulation time in seconds.
using SimTime = double;

struct EventHandle {
    std::uint64_t sequence = 0;
    friend bool operator==(EventHandle, EventHandle) = default;
};

template <typename Payload>
struct Event {
    SimTime time = 0.0;
    std::uint64_t sequence = 0;
    Payload payload{};
};

/// Future event list ordered by (time, insertion sequence).
///
/// Same-time events fire in the order they were scheduled. The calendar owns
/// the clock: `next()` advances it to the time of the returned event.
/// Cancellation is lazy; cancelled entries are skipped when they reach the top.
template <typename Payload>
class EventCalendar {
public:
    EventHandle schedule(SimTime at, Payload payload)
    {
        if (!(at >= now_)) {
            throw ModelFault("event scheduled in the past: t=" + std::to_string(at) +
                             " < clock=" + std::to_string(now_));
        }
        const std::uint64_t seq = next_sequence_++;
        settled_.push_back(false);
        heap_.push(Event<Payload>{at, seq, std::move(payload)});
        return EventHandle{seq};
    }

    /// Returns false if the event already fired or was already cancelled.
    bool cancel(EventHandle handle)
    {
        if (handle.sequence >= next_sequence_ || settled_[handle.sequence]) {
            return false;
        }
        settled_[handle.sequence] = true;
        cancelled_.insert(handle.sequence);
        return true;
    }

    std::optional<Event<Payload>> next()
    {
        drop_cancelled();
        if (heap_.empty()) {
            return std::nullopt;
        }
        Event<Payload> ev = heap_.top();
        heap_.pop();
        now_ = ev.time;
        settled_[ev.sequence] = true;
        return ev;
    }

    /// Time of the next live event, without dispatching it.
    std::optional<SimTime> peek_time()
    {
        drop_cancelled();
        if (heap_.empty()) {
            return std::nullopt;
        }
        return heap_.top().time;
    }

    SimTime now() const noexcept { return now_; }
    bool empty()
    {
        drop_cancelled();
        return heap_.empty();
    }
    std::size_t pending() const noexcept { return heap_.size() - cancelled_.size(); }

private:
    struct Later {
        bool operator()(const Event<Payload>& a, const Event<Payload>& b) const noexcept
        {
            if (a.time != b.time) {
                return a.time > b.time;
            }
            return a.sequence > b.sequence;
        }
    };

    void drop_cancelled()
    {
        while (!cancelled_.empty() && !heap_.empty()) {
            auto it = cancelled_.find(heap_.top().sequence);
            if (it == cancelled_.end()) {
                break;
            }
            cancelled_.erase(it);
            heap_.pop();
        }
    }

    std::priority_queue<Event<Payload>, std::vector<Event<Payload>>, Later> heap_;
    std::unordered_set<std::uint64_t> cancelled_;
    // fired or cancelled, indexed by sequence
    std::vector<bool> settled_;
    std::uint64_t next_sequence_ = 0;
    SimTime now_ = 0.0;
};

} // namespace gridflow::des
