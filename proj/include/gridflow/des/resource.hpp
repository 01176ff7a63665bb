#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "gridflow/des/fault.hpp"

namespace gridflow::des {

using EntityId = std::uint32_t;

struct Unbounded {};
inline constexpr Unbounded unbounded{};

struct SeizeResult {
    bool granted = false;
    // position in the wait queue when not granted (0 = head)
    std::size_t queue_position = 0;
};

/// Capacity-limited resource with a FIFO wait queue.
///
/// An entity may be either a holder or a waiter, never both, and never twice.
/// `release` hands the freed unit to the queue head; the caller is responsible
/// for scheduling the promoted entity's continuation.
class Resource {
public:
    explicit Resource(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity == 0) {
            throw ModelFault("resource capacity must be positive");
        }
        holders_.reserve(capacity);
    }
    explicit Resource(Unbounded) {}

    SeizeResult seize(EntityId entity)
    {
        if (!members_.insert(entity).second) {
            throw ModelFault("entity " + std::to_string(entity) +
                             " seized a resource it already holds or waits on");
        }
        if (!capacity_ || holders_.size() < *capacity_) {
            if (capacity_) {
                holders_.push_back(entity);
            }
            ++holder_count_;
            return {true, 0};
        }
        queue_.push_back(entity);
        return {false, queue_.size() - 1};
    }

    /// Returns the entity promoted from the wait queue, if any.
    std::optional<EntityId> release(EntityId entity)
    {
        if (capacity_) {
            auto it = std::find(holders_.begin(), holders_.end(), entity);
            if (it == holders_.end()) {
                throw ModelFault("entity " + std::to_string(entity) +
                                 " released a resource it does not hold");
            }
            holders_.erase(it);
        } else if (members_.count(entity) == 0) {
            throw ModelFault("entity " + std::to_string(entity) +
                             " released a resource it does not hold");
        }
        members_.erase(entity);
        --holder_count_;

        if (queue_.empty()) {
            return std::nullopt;
        }
        const EntityId promoted = queue_.front();
        queue_.pop_front();
        holders_.push_back(promoted);
        ++holder_count_;
        return promoted;
    }

    bool holds(EntityId entity) const
    {
        if (capacity_) {
            return std::find(holders_.begin(), holders_.end(), entity) != holders_.end();
        }
        return members_.count(entity) != 0;
    }

    bool is_unbounded() const noexcept { return !capacity_.has_value(); }
    std::optional<std::size_t> capacity() const noexcept { return capacity_; }
    std::size_t holder_count() const noexcept { return holder_count_; }
    std::size_t queue_length() const noexcept { return queue_.size(); }
    const std::deque<EntityId>& wait_queue() const noexcept { return queue_; }

private:
    std::optional<std::size_t> capacity_;
    // tracked individually only for bounded resources; unbounded ones use members_
    std::vector<EntityId> holders_;
    std::size_t holder_count_ = 0;
    std::deque<EntityId> queue_;
    std::unordered_set<EntityId> members_;
};

} // namespace gridflow::des
