#pragma once

#include <cstdint>

#include "gridflow/des/random.hpp"
#include "gridflow/traffic/network.hpp"

namespace gridflow::traffic {

enum class LightMode : std::uint8_t { Synchronized, Desynchronized };

/// Phase index 0..3 = a..d. Phase p serves the approach with the same index.
using Phase = std::uint8_t;

inline constexpr Phase phase_count = 4;

constexpr Phase phase_for_approach(Compass approach) noexcept { return static_cast<Phase>(approach); }
constexpr Compass approach_for_phase(Phase p) noexcept { return static_cast<Compass>(p); }
constexpr char phase_letter(Phase p) noexcept { return static_cast<char>('a' + p); }

inline des::Distribution phase_duration(LightMode mode)
{
    return mode == LightMode::Synchronized ? des::Distribution::constant(45.0)
                                           : des::Distribution::uniform(30.0, 60.0);
}

/// Four-phase cyclic signal: exactly one phase is green, and the green moves
/// a -> b -> c -> d -> a at every phase boundary.
class TrafficLightController {
public:
    TrafficLightController(int intersection, LightMode mode, Phase start = 0)
        : intersection_(intersection), green_(start), durations_(phase_duration(mode))
    {}

    /// Duration of the phase that is starting now.
    double draw_duration(des::RandomStream& stream) const { return durations_.sample(stream); }

    struct PhaseChange {
        Phase green;
        double duration;
    };

    /// Phase-boundary step: the green moves on and the new phase's duration
    /// is drawn from the controller's policy.
    PhaseChange advance_phase(des::RandomStream& stream)
    {
        const Phase g = advance();
        return {g, draw_duration(stream)};
    }

    /// Moves the green to the next phase and returns the newly green phase.
    Phase advance() noexcept
    {
        green_ = static_cast<Phase>((green_ + 1) % phase_count);
        return green_;
    }

    bool is_green(Compass approach) const noexcept { return phase_for_approach(approach) == green_; }
    Phase green_phase() const noexcept { return green_; }
    int intersection() const noexcept { return intersection_; }

private:
    int intersection_;
    Phase green_;
    des::Distribution durations_;
};

} // namespace gridflow::traffic
