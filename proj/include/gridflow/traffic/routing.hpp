#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "gridflow/des/random.hpp"
#include "gridflow/traffic/light.hpp"
#include "gridflow/traffic/network.hpp"

namespace gridflow::traffic {

enum class RoutingRule : std::uint8_t { SD, ST, LC };
enum class VehicleClass : std::uint8_t { GT, FT };

inline std::string_view to_string(RoutingRule r)
{
    switch (r) {
    case RoutingRule::SD: return "SD";
    case RoutingRule::ST: return "ST";
    case RoutingRule::LC: return "LC";
    }
    return "?";
}

inline std::string_view to_string(VehicleClass c) { return c == VehicleClass::GT ? "GT" : "FT"; }

/// A vehicle standing at the head of one intersection approach.
struct HeadOfApproach {
    int intersection = 1; // 1..4
    Compass heading = Compass::East;
    VehicleClass cls = VehicleClass::FT;

    Compass approach() const noexcept { return approach_of(heading); }
    Phase own_phase() const noexcept { return phase_for_approach(approach()); }
};

/// Whether the vehicle may leave the intersection with movement `m`. Every
/// intersection has four neighbours, so the only restriction is that FT never
/// head back to the entry portal W0.
inline bool movement_permitted(const HeadOfApproach& v, Movement m) noexcept
{
    const Compass out = turn(v.heading, m);
    return !(v.cls == VehicleClass::FT && v.intersection == 1 && out == Compass::West);
}

/// FT movement that heads for the east exit. Westbound FT turn north off the
/// corridor since a U-turn is not available.
constexpr Movement ft_nominal(Compass heading) noexcept
{
    switch (heading) {
    case Compass::East: return Movement::Straight;
    case Compass::South: return Movement::Left;
    case Compass::North: return Movement::Right;
    case Compass::West: return Movement::Right;
    }
    return Movement::Straight;
}

/// GT pick uniformly among the permitted movements in `choices`.
template <std::size_t N>
Movement gt_choice(const HeadOfApproach& v, const std::array<Movement, N>& choices, des::RandomStream& stream)
{
    std::array<Movement, N> allowed{};
    std::size_t n = 0;
    for (Movement m : choices) {
        if (movement_permitted(v, m)) {
            allowed[n++] = m;
        }
    }
    return allowed[static_cast<std::size_t>(stream.below(n))];
}

inline constexpr std::array<Movement, 3> all_movements{Movement::Straight, Movement::Left, Movement::Right};

struct Decision {
    bool depart = false;
    Movement movement = Movement::Straight;
    // phase to hold for when not departing
    Phase hold_until = 0;

    static Decision go(Movement m) { return {true, m, 0}; }
    static Decision wait_for(Phase p) { return {false, Movement::Straight, p}; }
};

/// Shortest distance: wait for the own approach's green, then take the
/// nominal movement.
inline Decision decide_sd(const HeadOfApproach& v, const TrafficLightController& light, Movement nominal)
{
    if (light.is_green(v.approach())) {
        return Decision::go(nominal);
    }
    return Decision::wait_for(v.own_phase());
}

/// Alternative movement granted when `phase` is green for a vehicle on
/// `approach`: the next phase in the cycle allows a right turn, the one after
/// it a left turn, and the phase just before the own phase is never used.
inline std::optional<Movement> st_alternative(Compass approach, Phase phase) noexcept
{
    const unsigned offset = (phase + phase_count - phase_for_approach(approach)) % phase_count;
    switch (offset) {
    case 1: return Movement::Right;
    case 2: return Movement::Left;
    default: return std::nullopt;
    }
}

/// Shortest time: go on the own green in the nominal direction, otherwise
/// take whichever permitted alternative is green right now, otherwise hold
/// for the next permitted phase in cycle order.
inline Decision decide_st(const HeadOfApproach& v, const TrafficLightController& light, Movement nominal)
{
    const Phase green = light.green_phase();
    if (green == v.own_phase()) {
        return Decision::go(nominal);
    }
    if (auto alt = st_alternative(v.approach(), green); alt && movement_permitted(v, *alt)) {
        return Decision::go(*alt);
    }
    for (Phase step = 1; step <= phase_count; ++step) {
        const Phase p = static_cast<Phase>((green + step) % phase_count);
        if (p == v.own_phase()) {
            return Decision::wait_for(p);
        }
        if (auto alt = st_alternative(v.approach(), p); alt && movement_permitted(v, *alt)) {
            return Decision::wait_for(p);
        }
    }
    return Decision::wait_for(v.own_phase());
}

/// Less crowded: wait for the own green, then pick straight or right by the
/// smaller summed queue length. No left turns. Equal queues go to
/// `preferred`, which is Straight for a vehicle following the corridor.
inline Decision decide_lc(const HeadOfApproach& v, const TrafficLightController& light, std::size_t queued_straight,
                          std::size_t queued_right, Movement preferred = Movement::Straight)
{
    if (!light.is_green(v.approach())) {
        return Decision::wait_for(v.own_phase());
    }
    // FT next to W0 have a single candidate
    if (!movement_permitted(v, Movement::Right)) {
        return Decision::go(Movement::Straight);
    }
    if (!movement_permitted(v, Movement::Straight)) {
        return Decision::go(Movement::Right);
    }
    if (queued_straight == queued_right) {
        return Decision::go(preferred == Movement::Right ? Movement::Right : Movement::Straight);
    }
    return Decision::go(queued_right < queued_straight ? Movement::Right : Movement::Straight);
}

/// Tie-break candidate for an FT under the less-crowded rule: its nominal
/// movement when that is straight or right, otherwise straight.
constexpr Movement lc_preference(Movement nominal) noexcept
{
    return nominal == Movement::Right ? Movement::Right : Movement::Straight;
}

inline constexpr std::array<Movement, 2> lc_movements{Movement::Straight, Movement::Right};

enum class BoundaryOutcome : std::uint8_t { Exit, LoopBack, Forward };

inline std::string_view to_string(BoundaryOutcome b)
{
    switch (b) {
    case BoundaryOutcome::Exit: return "exit";
    case BoundaryOutcome::LoopBack: return "loop-back";
    case BoundaryOutcome::Forward: return "forward";
    }
    return "?";
}

/// Decision at a north/south portal reached from intersection `column`.
/// GT leave with probability `gtesb`; FT always stay. Staying vehicles go back
/// towards column-1 with probability `tlb`, except at the two ends of the ring
/// where only one neighbour exists.
inline BoundaryOutcome boundary_decision(VehicleClass cls, int column, double gtesb, double tlb,
                                         des::RandomStream& stream)
{
    if (cls == VehicleClass::GT && stream.uniform01() < gtesb) {
        return BoundaryOutcome::Exit;
    }
    if (column <= 1) {
        return BoundaryOutcome::Forward;
    }
    if (column >= intersection_count) {
        return BoundaryOutcome::LoopBack;
    }
    return stream.uniform01() < tlb ? BoundaryOutcome::LoopBack : BoundaryOutcome::Forward;
}

} // namespace gridflow::traffic
