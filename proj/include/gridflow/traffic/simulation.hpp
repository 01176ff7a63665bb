#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridflow/des/calendar.hpp"
#include "gridflow/des/hold.hpp"
#include "gridflow/des/random.hpp"
#include "gridflow/des/resource.hpp"
#include "gridflow/des/trace.hpp"
#include "gridflow/traffic/light.hpp"
#include "gridflow/traffic/network.hpp"
#include "gridflow/traffic/routing.hpp"

namespace gridflow::traffic {

using des::EntityId;
using des::SimTime;

struct ModelParams {
    RoutingRule rule = RoutingRule::SD;
    double ia_gt_s = 60.0;
    double ia_ft_s = 60.0;
    double gtesb = 0.7;
    double tlb = 0.15;
    LightMode light = LightMode::Synchronized;
    SimTime horizon_s = 86400.0;
};

/// The four per-replication responses. Times are in minutes; means over zero
/// exited FT are reported as 0 alongside `ft_exited == 0`.
struct ResponseSet {
    double ft_total_time_mean_min = 0.0;
    double ft_wait_time_mean_min = 0.0;
    std::uint64_t ft_exited = 0;
    std::uint64_t ft_wip_end = 0;

    friend bool operator==(const ResponseSet&, const ResponseSet&) = default;
};

struct ClassCounts {
    std::uint64_t spawned = 0;
    std::uint64_t exited = 0;
    std::uint64_t in_system = 0;
};

struct ReplicationOutcome {
    ResponseSet responses;
    ClassCounts ft;
    ClassCounts gt;
    std::uint64_t ft_exits_elsewhere = 0;
    double gt_total_time_mean_min = 0.0;
    double gt_wait_time_mean_min = 0.0;
    // longest head-of-approach wait for a signal, any vehicle
    double max_light_wait_s = 0.0;
    // sanity bounds on exited vehicles: move time within [n, 2n] seconds for n segments
    bool move_time_bounds_hold = true;
    std::uint64_t events = 0;
};

struct Vehicle {
    EntityId id = 0;
    VehicleClass cls = VehicleClass::FT;
    SimTime arrival = 0.0;
    std::optional<SimTime> exit_time;
    double move_time = 0.0;
    double pending_delay = 0.0;
    std::uint32_t segments_traversed = 0;
    SegmentId held = 0;
    SegmentId requested = 0;
    // head-of-approach bookkeeping at the current intersection
    SimTime head_since = 0.0;
    Movement nominal = Movement::Straight;
    NodeId exit_node = 0;

    double total_time() const { return exit_time ? *exit_time - arrival : 0.0; }
    double wait_time() const { return total_time() - move_time; }
};

enum class EventKind : std::uint8_t { Arrival, SegmentDone, Granted, Resume, PhaseChange };

struct EventPayload {
    EventKind kind = EventKind::Arrival;
    // vehicle id, vehicle class (Arrival) or intersection (PhaseChange)
    std::uint32_t subject = 0;
};

/// One replication of the network model: owns the clock, calendar, segments,
/// controllers and random streams. Nothing is shared between replications.
class Replication {
public:
    using Observer = std::function<void(const Replication&)>;

    Replication(const ModelParams& params, std::uint64_t base_seed, std::uint64_t scenario, std::uint64_t replication,
                des::TraceSink trace = {})
        : params_(params),
          network_(Network::build()),
          trace_(trace),
          arrivals_gt_(base_seed, {scenario, replication, des::StreamPurpose::ArrivalsGT}),
          arrivals_ft_(base_seed, {scenario, replication, des::StreamPurpose::ArrivalsFT}),
          segment_delay_(base_seed, {scenario, replication, des::StreamPurpose::SegmentDelay}),
          light_phase_(base_seed, {scenario, replication, des::StreamPurpose::LightPhase}),
          boundary_choice_(base_seed, {scenario, replication, des::StreamPurpose::BoundaryChoice}),
          gt_turn_choice_(base_seed, {scenario, replication, des::StreamPurpose::GtTurnChoice}),
          gap_gt_(des::Distribution::exponential(params.ia_gt_s)),
          gap_ft_(des::Distribution::exponential(params.ia_ft_s)),
          segment_delay_dist_(des::Distribution::uniform(1.0, 2.0))
    {
        if (!(params.horizon_s > 0.0)) {
            throw ConfigError("horizon_s", "must be positive");
        }
        if (!(params.gtesb >= 0.0 && params.gtesb <= 1.0)) {
            throw ConfigError("gtesb", "must be a probability");
        }
        if (!(params.tlb >= 0.0 && params.tlb <= 1.0)) {
            throw ConfigError("tlb", "must be a probability");
        }
        for (int k = 1; k <= intersection_count; ++k) {
            lights_.emplace_back(k, params.light);
        }
        entry_link_ = *network_.outbound(entry_node, Compass::East);
    }

    /// Called after every dispatched event. Used by invariant auditors.
    void set_observer(Observer observer) { observer_ = std::move(observer); }

    ReplicationOutcome run()
    {
        start();
        while (auto t = calendar_.peek_time()) {
            if (*t > params_.horizon_s) {
                break;
            }
            auto ev = calendar_.next();
            dispatch(ev->payload);
            ++events_;
            if (observer_) {
                observer_(*this);
            }
        }
        return finalize();
    }

    SimTime now() const noexcept { return calendar_.now(); }
    const Network& network() const noexcept { return network_; }
    const std::vector<TrafficLightController>& lights() const noexcept { return lights_; }
    const std::vector<Vehicle>& vehicles() const noexcept { return vehicles_; }
    const ModelParams& params() const noexcept { return params_; }

private:
    void start()
    {
        for (const auto& l : lights_) {
            trace_light("green", l.intersection(), l.green_phase());
            schedule_phase_change(l.intersection(), l.draw_duration(light_phase_));
        }
        schedule_arrival(VehicleClass::GT);
        schedule_arrival(VehicleClass::FT);
    }

    void schedule_arrival(VehicleClass cls)
    {
        const double gap = cls == VehicleClass::GT ? gap_gt_.sample(arrivals_gt_) : gap_ft_.sample(arrivals_ft_);
        const SimTime at = now() + gap;
        if (at < params_.horizon_s) {
            calendar_.schedule(at, {EventKind::Arrival, static_cast<std::uint32_t>(cls)});
        }
    }

    void schedule_phase_change(int intersection, double duration)
    {
        calendar_.schedule(now() + duration, {EventKind::PhaseChange, static_cast<std::uint32_t>(intersection)});
    }

    void dispatch(const EventPayload& p)
    {
        switch (p.kind) {
        case EventKind::Arrival: on_arrival(static_cast<VehicleClass>(p.subject)); break;
        case EventKind::SegmentDone: on_segment_done(vehicles_[p.subject]); break;
        case EventKind::Granted: on_granted(vehicles_[p.subject]); break;
        case EventKind::Resume: decide(vehicles_[p.subject]); break;
        case EventKind::PhaseChange: on_phase_change(static_cast<int>(p.subject)); break;
        }
    }

    void on_arrival(VehicleClass cls)
    {
        Vehicle v;
        v.id = static_cast<EntityId>(vehicles_.size());
        v.cls = cls;
        v.arrival = now();
        vehicles_.push_back(v);
        (cls == VehicleClass::GT ? gt_spawned_ : ft_spawned_)++;
        trace_vehicle("arrive", vehicles_.back(), node_name(entry_node));

        Vehicle& veh = vehicles_.back();
        const SegmentId entry = network_.link(entry_link_).first_segment;
        veh.requested = entry;
        const auto res = network_.segment(entry).seize(veh.id);
        if (!res.granted) {
            throw ModelFault("entry segment refused a vehicle");
        }
        trace_vehicle("seize", veh, network_.segment_label(entry));
        veh.held = entry;
        begin_delay(veh);
        schedule_arrival(cls);
    }

    void begin_delay(Vehicle& v)
    {
        v.pending_delay = segment_delay_dist_.sample(segment_delay_);
        calendar_.schedule(now() + v.pending_delay, {EventKind::SegmentDone, v.id});
    }

    void on_segment_done(Vehicle& v)
    {
        v.move_time += v.pending_delay;
        v.pending_delay = 0.0;
        ++v.segments_traversed;
        const Link& link = network_.link(network_.segment_link(v.held));
        const int index = v.held - link.first_segment;
        if (index + 1 < link.segment_count) {
            request(v, static_cast<SegmentId>(v.held + 1));
        } else {
            arrive_at_node(v, link);
        }
    }

    void request(Vehicle& v, SegmentId seg)
    {
        v.requested = seg;
        const auto res = network_.segment(seg).seize(v.id);
        if (res.granted) {
            trace_vehicle("seize", v, network_.segment_label(seg));
            on_granted(v);
        } else {
            trace_vehicle("enqueue", v, network_.segment_label(seg));
        }
    }

    void on_granted(Vehicle& v)
    {
        const SegmentId previous = v.held;
        v.held = v.requested;
        release(v, previous);
        begin_delay(v);
    }

    void release(Vehicle& v, SegmentId seg)
    {
        const auto promoted = network_.segment(seg).release(v.id);
        trace_vehicle("release", v, network_.segment_label(seg));
        if (promoted) {
            trace_vehicle("seize", vehicles_[*promoted], network_.segment_label(seg));
            calendar_.schedule(now(), {EventKind::Granted, *promoted});
        }
    }

    void arrive_at_node(Vehicle& v, const Link& inbound)
    {
        const NodeId node = inbound.to;
        switch (node_kind(node)) {
        case NodeKind::Entry:
        case NodeKind::Exit:
            leave_system(v, node);
            return;
        case NodeKind::Intersection: {
            v.head_since = now();
            const HeadOfApproach head = head_of(v, inbound);
            if (v.cls == VehicleClass::FT) {
                v.nominal = ft_nominal(inbound.heading);
                if (params_.rule == RoutingRule::LC) {
                    v.nominal = lc_preference(v.nominal);
                }
            } else if (params_.rule == RoutingRule::LC) {
                v.nominal = gt_choice(head, lc_movements, gt_turn_choice_);
            } else {
                v.nominal = gt_choice(head, all_movements, gt_turn_choice_);
            }
            decide(v);
            return;
        }
        case NodeKind::NorthPortal:
        case NodeKind::SouthPortal:
            at_portal(v, inbound);
            return;
        }
    }

    HeadOfApproach head_of(const Vehicle& v, const Link& inbound) const
    {
        return HeadOfApproach{node_column(inbound.to), inbound.heading, v.cls};
    }

    void decide(Vehicle& v)
    {
        const Link& inbound = network_.link(network_.segment_link(v.held));
        const HeadOfApproach head = head_of(v, inbound);
        const TrafficLightController& light = lights_[head.intersection - 1];

        Decision d;
        switch (params_.rule) {
        case RoutingRule::SD: d = decide_sd(head, light, v.nominal); break;
        case RoutingRule::ST: d = decide_st(head, light, v.nominal); break;
        case RoutingRule::LC: {
            const NodeId node = inbound.to;
            const auto straight = network_.outbound(node, turn(head.heading, Movement::Straight));
            const auto right = network_.outbound(node, turn(head.heading, Movement::Right));
            d = decide_lc(head, light, network_.queued_on(*straight), network_.queued_on(*right), v.nominal);
            break;
        }
        }

        if (!d.depart) {
            signals_.hold(v.id, signal_of(head.intersection, d.hold_until));
            trace_vehicle("hold", v, node_name(inbound.to));
            return;
        }
        max_light_wait_ = std::max(max_light_wait_, now() - v.head_since);
        const auto out = network_.outbound(inbound.to, turn(head.heading, d.movement));
        if (!out) {
            throw ModelFault("no outbound link for chosen movement at " + node_name(inbound.to));
        }
        trace_vehicle("depart", v, node_name(inbound.to));
        request(v, network_.link(*out).first_segment);
    }

    void at_portal(Vehicle& v, const Link& inbound)
    {
        const NodeId portal = inbound.to;
        const bool north = node_kind(portal) == NodeKind::NorthPortal;
        if (node_kind(inbound.from) != NodeKind::Intersection) {
            // came round the ring: descend the branch without a new decision
            request(v, network_.link(*network_.outbound(portal, north ? Compass::South : Compass::North)).first_segment);
            return;
        }
        const auto outcome =
            boundary_decision(v.cls, node_column(portal), params_.gtesb, params_.tlb, boundary_choice_);
        if (outcome == BoundaryOutcome::Exit) {
            leave_system(v, portal);
            return;
        }
        const Compass dir = outcome == BoundaryOutcome::LoopBack ? Compass::West : Compass::East;
        request(v, network_.link(*network_.outbound(portal, dir)).first_segment);
    }

    void leave_system(Vehicle& v, NodeId where)
    {
        release(v, v.held);
        v.exit_time = now();
        v.exit_node = where;
        trace_vehicle("exit", v, node_name(where));
    }

    void on_phase_change(int intersection)
    {
        TrafficLightController& light = lights_[intersection - 1];
        trace_light("red", intersection, light.green_phase());
        const auto change = light.advance_phase(light_phase_);
        trace_light("green", intersection, change.green);
        for (EntityId id : signals_.fire(signal_of(intersection, change.green))) {
            calendar_.schedule(now(), {EventKind::Resume, id});
        }
        schedule_phase_change(intersection, change.duration);
    }

    static des::SignalId signal_of(int intersection, Phase phase)
    {
        return static_cast<des::SignalId>(intersection * phase_count + phase);
    }

    ReplicationOutcome finalize() const
    {
        ReplicationOutcome out;
        out.events = events_;
        out.max_light_wait_s = max_light_wait_;
        out.ft.spawned = ft_spawned_;
        out.gt.spawned = gt_spawned_;

        double ft_total = 0.0, ft_wait = 0.0, gt_total = 0.0, gt_wait = 0.0;
        for (const Vehicle& v : vehicles_) {
            ClassCounts& counts = v.cls == VehicleClass::FT ? out.ft : out.gt;
            if (!v.exit_time) {
                ++counts.in_system;
                continue;
            }
            ++counts.exited;
            const double n = v.segments_traversed;
            if (v.move_time < n || v.move_time > 2.0 * n || v.wait_time() < -1e-9) {
                out.move_time_bounds_hold = false;
            }
            if (v.cls == VehicleClass::FT) {
                if (v.exit_node != exit_node) {
                    ++out.ft_exits_elsewhere;
                }
                ft_total += v.total_time();
                ft_wait += v.wait_time();
            } else {
                gt_total += v.total_time();
                gt_wait += v.wait_time();
            }
        }
        ResponseSet& r = out.responses;
        r.ft_exited = out.ft.exited - out.ft_exits_elsewhere;
        r.ft_wip_end = out.ft.in_system;
        if (out.ft.exited > 0) {
            r.ft_total_time_mean_min = ft_total / static_cast<double>(out.ft.exited) / 60.0;
            r.ft_wait_time_mean_min = ft_wait / static_cast<double>(out.ft.exited) / 60.0;
        }
        if (out.gt.exited > 0) {
            out.gt_total_time_mean_min = gt_total / static_cast<double>(out.gt.exited) / 60.0;
            out.gt_wait_time_mean_min = gt_wait / static_cast<double>(out.gt.exited) / 60.0;
        }
        return out;
    }

    void trace_vehicle(std::string_view kind, const Vehicle& v, const std::string& location)
    {
        if (trace_.enabled()) {
            trace_.emit(now(), kind, std::string(to_string(v.cls)) + std::to_string(v.id), location);
        }
    }

    void trace_light(std::string_view kind, int intersection, Phase phase)
    {
        if (trace_.enabled()) {
            trace_.emit(now(), kind, "TL" + std::to_string(intersection),
                        "I" + std::to_string(intersection) + ":" + phase_letter(phase));
        }
    }

    ModelParams params_;
    Network network_;
    des::TraceSink trace_;
    des::EventCalendar<EventPayload> calendar_;
    des::SignalBoard signals_;
    std::vector<TrafficLightController> lights_;
    std::vector<Vehicle> vehicles_;
    LinkId entry_link_ = 0;

    des::RandomStream arrivals_gt_;
    des::RandomStream arrivals_ft_;
    des::RandomStream segment_delay_;
    des::RandomStream light_phase_;
    des::RandomStream boundary_choice_;
    des::RandomStream gt_turn_choice_;
    des::Distribution gap_gt_;
    des::Distribution gap_ft_;
    des::Distribution segment_delay_dist_;

    Observer observer_;
    std::uint64_t events_ = 0;
    std::uint64_t ft_spawned_ = 0;
    std::uint64_t gt_spawned_ = 0;
    double max_light_wait_ = 0.0;
};

} // namespace gridflow::traffic
