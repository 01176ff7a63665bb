#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridflow/des/fault.hpp"
#include "gridflow/des/resource.hpp"

namespace gridflow::des {

using SignalId = std::uint32_t;

/// Condition holds: entities park on a signal and are all released, in the
/// order they parked, when that signal fires.
class SignalBoard {
public:
    void hold(EntityId entity, SignalId signal)
    {
        if (!holding_.emplace(entity, signal).second) {
            throw ModelFault("entity " + std::to_string(entity) + " is already holding on a signal");
        }
        waiters_[signal].push_back(entity);
    }

    /// Releases every holder of `signal` in FIFO hold order. The caller
    /// schedules their resumption at the current time.
    std::vector<EntityId> fire(SignalId signal)
    {
        auto it = waiters_.find(signal);
        if (it == waiters_.end() || it->second.empty()) {
            return {};
        }
        std::vector<EntityId> released;
        released.swap(it->second);
        for (EntityId e : released) {
            holding_.erase(e);
        }
        return released;
    }

    bool is_holding(EntityId entity) const { return holding_.count(entity) != 0; }

    std::size_t holders(SignalId signal) const
    {
        auto it = waiters_.find(signal);
        return it == waiters_.end() ? 0 : it->second.size();
    }

private:
    std::unordered_map<SignalId, std::vector<EntityId>> waiters_;
    std::unordered_map<EntityId, SignalId> holding_;
};

} // namespace gridflow::des
