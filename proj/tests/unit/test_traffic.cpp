#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gridflow/des/calendar.hpp"
#include "gridflow/des/resource.hpp"
#include "gridflow/traffic/simulation.hpp"

using namespace gridflow;
using namespace gridflow::traffic;

TEST(Network, SegmentCounts)
{
    const Network net = Network::build();
    EXPECT_EQ(net.links().size(), 38u);
    EXPECT_EQ(net.segment_count(), 228u);
    std::size_t bounded = 0, unbounded_count = 0;
    for (SegmentId s = 0; s < net.segment_count(); ++s) {
        if (net.segment(s).is_unbounded()) {
            ++unbounded_count;
            EXPECT_EQ(net.segment_label(s), "W0>I1#0");
        } else {
            ++bounded;
            EXPECT_EQ(net.segment(s).capacity(), std::optional<std::size_t>(1));
        }
    }
    EXPECT_EQ(bounded, 227u);
    EXPECT_EQ(unbounded_count, 1u);
    for (const auto& l : net.links()) {
        EXPECT_EQ(l.segment_count, 6);
    }
}

TEST(Network, EveryIntersectionHasFourNeighbours)
{
    const Network net = Network::build();
    for (int k = 1; k <= intersection_count; ++k) {
        for (Compass c : all_compass) {
            EXPECT_TRUE(net.outbound(intersection_node(k), c)) << k;
        }
    }
    EXPECT_FALSE(net.outbound(exit_node, Compass::East));
    EXPECT_EQ(net.link(*net.find_link(north_portal(2), north_portal(3))).heading, Compass::East);
    EXPECT_EQ(net.link(*net.find_link(intersection_node(3), south_portal(3))).heading, Compass::South);
}

TEST(Network, DescribeListsEveryLink)
{
    std::ostringstream os;
    Network::build().describe(os);
    const std::string s = os.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 38);
    EXPECT_NE(s.find("W0\tI1\tE\t6\tentry-unbounded"), std::string::npos);
}

TEST(Network, TurnsAreClockwiseConsistent)
{
    EXPECT_EQ(turn(Compass::East, Movement::Right), Compass::South);
    EXPECT_EQ(turn(Compass::East, Movement::Left), Compass::North);
    EXPECT_EQ(turn(Compass::North, Movement::Right), Compass::East);
    EXPECT_EQ(approach_of(Compass::East), Compass::West);
}

TEST(TrafficLight, SynchronizedPhasesLastFortyFiveSeconds)
{
    des::RandomStream s(1, {0, 0, des::StreamPurpose::LightPhase});
    TrafficLightController light(1, LightMode::Synchronized);
    EXPECT_EQ(light.green_phase(), 0);
    for (int i = 1; i <= 8; ++i) {
        const auto change = light.advance_phase(s);
        EXPECT_EQ(change.green, i % 4);
        EXPECT_EQ(change.duration, 45.0);
    }
}

TEST(TrafficLight, DesynchronizedDurationsInRange)
{
    des::RandomStream s(1, {0, 0, des::StreamPurpose::LightPhase});
    TrafficLightController light(2, LightMode::Desynchronized);
    for (int i = 0; i < 10000; ++i) {
        const auto change = light.advance_phase(s);
        EXPECT_GE(change.duration, 30.0);
        EXPECT_LT(change.duration, 60.0);
    }
}

TEST(TrafficLight, ExactlyOneGreenApproach)
{
    TrafficLightController light(1, LightMode::Synchronized);
    for (int i = 0; i < 4; ++i) {
        int greens = 0;
        for (Compass c : all_compass) {
            greens += light.is_green(c);
        }
        EXPECT_EQ(greens, 1);
        light.advance();
    }
}

namespace {

TrafficLightController light_with_green(Phase p)
{
    TrafficLightController light(2, LightMode::Synchronized);
    while (light.green_phase() != p) {
        light.advance();
    }
    return light;
}

} // namespace

TEST(Routing, ShortestDistanceWaitsForOwnGreen)
{
    const HeadOfApproach eastbound{2, Compass::East, VehicleClass::FT};
    for (Phase p = 0; p < phase_count; ++p) {
        const auto d = decide_sd(eastbound, light_with_green(p), Movement::Straight);
        EXPECT_EQ(d.depart, p == 0);
        if (!d.depart) {
            EXPECT_EQ(d.hold_until, 0);
        }
    }
}

TEST(Routing, ShortestDistanceWorstCaseWaitIsThreePhases)
{
    // a vehicle arriving just after its own green ends waits for the other three phases
    const double phase = 45.0;
    double worst = 0.0;
    for (double arrival = 0.0; arrival < 4 * phase; arrival += 0.5) {
        const double next_own = std::ceil(arrival / (4 * phase)) * 4 * phase;
        const bool green_now = std::fmod(arrival, 4 * phase) < phase;
        worst = std::max(worst, green_now ? 0.0 : next_own - arrival);
    }
    EXPECT_EQ(worst, 135.0);
}

TEST(Routing, ShortestTimeUsesAlternativePhases)
{
    const HeadOfApproach eastbound{2, Compass::East, VehicleClass::FT};
    // own phase a, b gives a right turn, c a left turn, d nothing
    EXPECT_EQ(decide_st(eastbound, light_with_green(0), Movement::Straight).movement, Movement::Straight);
    auto b = decide_st(eastbound, light_with_green(1), Movement::Straight);
    EXPECT_TRUE(b.depart);
    EXPECT_EQ(b.movement, Movement::Right);
    auto c = decide_st(eastbound, light_with_green(2), Movement::Straight);
    EXPECT_TRUE(c.depart);
    EXPECT_EQ(c.movement, Movement::Left);
    auto d = decide_st(eastbound, light_with_green(3), Movement::Straight);
    EXPECT_FALSE(d.depart);
    EXPECT_EQ(d.hold_until, 0);
}

TEST(Routing, ShortestTimeNeverWaitsLongerThanShortestDistance)
{
    for (int k = 1; k <= intersection_count; ++k) {
        for (Compass h : all_compass) {
            for (VehicleClass cls : {VehicleClass::GT, VehicleClass::FT}) {
                const HeadOfApproach v{k, h, cls};
                for (Phase g = 0; g < phase_count; ++g) {
                    const auto st = decide_st(v, light_with_green(g), ft_nominal(h));
                    const auto sd = decide_sd(v, light_with_green(g), ft_nominal(h));
                    auto phases_to = [&](const Decision& d) {
                        return d.depart ? 0 : (d.hold_until + phase_count - g) % phase_count;
                    };
                    EXPECT_LE(phases_to(st), phases_to(sd));
                    if (st.depart) {
                        EXPECT_TRUE(movement_permitted(v, st.movement));
                    }
                }
            }
        }
    }
}

TEST(Routing, FreightNeverHeadsBackToEntry)
{
    const HeadOfApproach southbound_at_i1{1, Compass::South, VehicleClass::FT};
    EXPECT_FALSE(movement_permitted(southbound_at_i1, Movement::Right));
    // the west approach's right turn would be the only alternative on phase b for a southbound vehicle
    for (Phase g = 0; g < phase_count; ++g) {
        const auto d = decide_st(southbound_at_i1, light_with_green(g), Movement::Left);
        if (d.depart) {
            EXPECT_NE(turn(Compass::South, d.movement), Compass::West);
        }
    }
}

TEST(Routing, LessCrowdedComparesSummedQueues)
{
    Network net = Network::build();
    const NodeId i2 = intersection_node(2);
    const LinkId straight = *net.outbound(i2, Compass::East);
    const LinkId right = *net.outbound(i2, Compass::South);

    // place queues by hand and keep an independent tally
    std::map<LinkId, std::size_t> expected;
    EntityId next = 1000;
    auto place = [&](LinkId link, int segment, int waiting) {
        const SegmentId s = net.link(link).first_segment + segment;
        net.segment(s).seize(next++);
        for (int i = 0; i < waiting; ++i) {
            net.segment(s).seize(next++);
        }
        expected[link] += waiting;
    };
    place(straight, 0, 2);
    place(straight, 3, 1);
    place(right, 1, 1);
    place(right, 5, 0);

    std::size_t direct_straight = 0, direct_right = 0;
    for (int i = 0; i < segments_per_link; ++i) {
        direct_straight += net.segment(net.link(straight).first_segment + i).wait_queue().size();
        direct_right += net.segment(net.link(right).first_segment + i).wait_queue().size();
    }
    EXPECT_EQ(net.queued_on(straight), expected[straight]);
    EXPECT_EQ(net.queued_on(right), expected[right]);
    EXPECT_EQ(net.queued_on(straight), direct_straight);
    EXPECT_EQ(net.queued_on(right), direct_right);

    const HeadOfApproach v{2, Compass::East, VehicleClass::FT};
    const auto light = light_with_green(0);
    const auto d = decide_lc(v, light, net.queued_on(straight), net.queued_on(right));
    EXPECT_TRUE(d.depart);
    EXPECT_EQ(d.movement, Movement::Right);

    EXPECT_EQ(decide_lc(v, light, 1, 3).movement, Movement::Straight);
    EXPECT_EQ(decide_lc(v, light, 2, 2).movement, Movement::Straight);
    EXPECT_EQ(decide_lc(v, light, 2, 2, Movement::Right).movement, Movement::Right);
    EXPECT_FALSE(decide_lc(v, light_with_green(1), 0, 5).depart);
}

TEST(Routing, LessCrowdedRespectsEntryExclusion)
{
    const auto light = light_with_green(phase_for_approach(Compass::North));
    const HeadOfApproach southbound{1, Compass::South, VehicleClass::FT};
    EXPECT_EQ(decide_lc(southbound, light, 10, 0).movement, Movement::Straight);
}

TEST(Boundary, GeneralTrafficExitFrequency)
{
    des::RandomStream s(3, {0, 0, des::StreamPurpose::BoundaryChoice});
    const int n = 100'000;
    int exits = 0, loop = 0, stay = 0;
    for (int i = 0; i < n; ++i) {
        const auto b = boundary_decision(VehicleClass::GT, 2, 0.9, 0.15, s);
        exits += b == BoundaryOutcome::Exit;
        if (b != BoundaryOutcome::Exit) {
            ++stay;
            loop += b == BoundaryOutcome::LoopBack;
        }
    }
    EXPECT_NEAR(static_cast<double>(exits) / n, 0.9, 0.01);
    EXPECT_NEAR(static_cast<double>(loop) / stay, 0.15, 0.02);
}

TEST(Boundary, FreightNeverExitsAndRingEndsAreForced)
{
    des::RandomStream s(4, {0, 0, des::StreamPurpose::BoundaryChoice});
    for (int i = 0; i < 1000; ++i) {
        EXPECT_NE(boundary_decision(VehicleClass::FT, 2, 1.0, 0.5, s), BoundaryOutcome::Exit);
        EXPECT_EQ(boundary_decision(VehicleClass::FT, 1, 0.0, 1.0, s), BoundaryOutcome::Forward);
        EXPECT_EQ(boundary_decision(VehicleClass::FT, 4, 0.0, 0.0, s), BoundaryOutcome::LoopBack);
    }
}

// Two capacity-1 segments in series, one second each. A vehicle keeps its
// segment until it has seized the next. Hand-enumerated: arrivals at 0, 0.25,
// 0.5 exit at 2, 3, 4, and the third waits on the first segment from 0.5 to 2.
TEST(SegmentChain, TwoSegmentOccupancyMatchesHandEnumeration)
{
    enum Kind { Arrive, Done, Granted };
    struct Ev {
        Kind kind;
        des::EntityId v;
    };
    des::EventCalendar<Ev> cal;
    std::vector<des::Resource> seg;
    seg.emplace_back(1);
    seg.emplace_back(1);
    std::vector<int> at(3, -1);
    std::vector<double> exit(3, -1.0), queued_since(3, -1.0), queued_until(3, -1.0);
    for (des::EntityId v = 0; v < 3; ++v) {
        cal.schedule(0.25 * v, {Arrive, v});
    }
    auto release = [&](int s, des::EntityId v) {
        if (auto p = seg[s].release(v)) {
            cal.schedule(cal.now(), {Granted, *p});
        }
    };
    while (auto ev = cal.next()) {
        const auto v = ev->payload.v;
        switch (ev->payload.kind) {
        case Arrive:
            if (seg[0].seize(v).granted) {
                at[v] = 0;
                cal.schedule(cal.now() + 1.0, {Done, v});
            } else {
                queued_since[v] = cal.now();
            }
            break;
        case Granted: {
            const int target = at[v] + 1;
            if (at[v] >= 0) {
                release(at[v], v);
            } else {
                queued_until[v] = cal.now();
            }
            at[v] = target;
            cal.schedule(cal.now() + 1.0, {Done, v});
            break;
        }
        case Done:
            if (at[v] == 1) {
                release(1, v);
                exit[v] = cal.now();
            } else if (seg[1].seize(v).granted) {
                release(0, v);
                at[v] = 1;
                cal.schedule(cal.now() + 1.0, {Done, v});
            }
            break;
        }
        for (const auto& s : seg) {
            ASSERT_LE(s.holder_count(), 1u);
        }
    }
    EXPECT_EQ(exit, (std::vector<double>{2.0, 3.0, 4.0}));
    EXPECT_EQ(queued_since[1], 0.25);
    EXPECT_EQ(queued_until[1], 1.0);
    EXPECT_EQ(queued_since[2], 0.5);
    EXPECT_EQ(queued_until[2], 2.0);
}

namespace {

ModelParams short_run(RoutingRule rule, LightMode mode, double horizon = 3600.0)
{
    ModelParams p;
    p.rule = rule;
    p.light = mode;
    p.ia_gt_s = 20.0;
    p.ia_ft_s = 20.0;
    p.horizon_s = horizon;
    return p;
}

} // namespace

class ReplicationInvariants : public ::testing::TestWithParam<std::tuple<RoutingRule, LightMode>> {};

TEST_P(ReplicationInvariants, ConservationCapacityAndBounds)
{
    const auto [rule, mode] = GetParam();
    Replication rep(short_run(rule, mode), 17, 3, 0);
    std::size_t violations = 0;
    rep.set_observer([&](const Replication& r) {
        const Network& net = r.network();
        for (SegmentId s = 0; s < net.segment_count(); ++s) {
            const auto& seg = net.segment(s);
            if (!seg.is_unbounded() && seg.holder_count() > 1) {
                ++violations;
            }
        }
    });
    const auto out = rep.run();
    EXPECT_EQ(violations, 0u);
    EXPECT_EQ(out.ft.spawned, out.ft.exited + out.ft.in_system);
    EXPECT_EQ(out.gt.spawned, out.gt.exited + out.gt.in_system);
    EXPECT_EQ(out.ft_exits_elsewhere, 0u);
    EXPECT_EQ(out.responses.ft_wip_end, out.ft.in_system);
    EXPECT_TRUE(out.move_time_bounds_hold);
    EXPECT_GT(out.responses.ft_exited, 0u);
    EXPECT_LE(out.responses.ft_wait_time_mean_min, out.responses.ft_total_time_mean_min);
    if (rule == RoutingRule::SD) {
        EXPECT_LE(out.max_light_wait_s, mode == LightMode::Synchronized ? 135.0 : 180.0);
    }
}

TEST_P(ReplicationInvariants, Deterministic)
{
    const auto [rule, mode] = GetParam();
    const auto a = Replication(short_run(rule, mode), 5, 1, 2).run();
    const auto b = Replication(short_run(rule, mode), 5, 1, 2).run();
    EXPECT_EQ(a.responses, b.responses);
    EXPECT_EQ(a.events, b.events);
    const auto c = Replication(short_run(rule, mode), 6, 1, 2).run();
    EXPECT_NE(a.events, c.events);
}

INSTANTIATE_TEST_SUITE_P(AllRules, ReplicationInvariants,
                         ::testing::Combine(::testing::Values(RoutingRule::SD, RoutingRule::ST, RoutingRule::LC),
                                            ::testing::Values(LightMode::Synchronized, LightMode::Desynchronized)),
                         [](const auto& info) {
                             return std::string(to_string(std::get<0>(info.param))) +
                                    (std::get<1>(info.param) == LightMode::Synchronized ? "_sync" : "_desync");
                         });

TEST(Replication, TraceRecordsAlternatingLights)
{
    std::ostringstream trace;
    Replication rep(short_run(RoutingRule::ST, LightMode::Desynchronized, 600.0), 1, 0, 0,
                    des::TraceSink(&trace));
    rep.run();
    std::istringstream is(trace.str());
    std::string line;
    std::map<std::string, int> greens;
    std::set<std::string> kinds;
    double last_time = 0.0;
    while (std::getline(is, line)) {
        std::istringstream f(line);
        double t;
        std::string kind, entity, location;
        ASSERT_TRUE(f >> t >> kind >> entity >> location) << line;
        EXPECT_GE(t, last_time);
        last_time = t;
        kinds.insert(kind);
        if (kind == "green") {
            EXPECT_EQ(++greens[entity], 1) << line;
        } else if (kind == "red") {
            EXPECT_EQ(--greens[entity], 0) << line;
        }
    }
    EXPECT_EQ(greens.size(), 4u);
    for (const char* k : {"arrive", "seize", "release", "depart", "exit", "green", "red"}) {
        EXPECT_TRUE(kinds.count(k)) << k;
    }
}

TEST(Replication, RejectsInvalidParameters)
{
    ModelParams p;
    p.gtesb = 1.5;
    EXPECT_THROW(Replication(p, 1, 0, 0), ConfigError);
    p = ModelParams{};
    p.ia_ft_s = 0.0;
    EXPECT_THROW(Replication(p, 1, 0, 0), ConfigError);
    p = ModelParams{};
    p.horizon_s = 0.0;
    EXPECT_THROW(Replication(p, 1, 0, 0), ConfigError);
}
