#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gridflow/des/resource.hpp"

namespace gridflow::traffic {

/// Compass directions in clockwise order. The index doubles as the phase
/// index of the approach coming *from* that side (a = West, b = North,
/// c = East, d = South).
enum class Compass : std::uint8_t { West = 0, North = 1, East = 2, South = 3 };

enum class Movement : std::uint8_t { Straight, Left, Right };

inline constexpr std::array<Compass, 4> all_compass{Compass::West, Compass::North, Compass::East,
                                                    Compass::South};

constexpr Compass opposite(Compass c) noexcept
{
    return static_cast<Compass>((static_cast<unsigned>(c) + 2) % 4);
}

/// Heading after performing `m` while travelling towards `heading`.
constexpr Compass turn(Compass heading, Movement m) noexcept
{
    const unsigned h = static_cast<unsigned>(heading);
    switch (m) {
    case Movement::Straight: return heading;
    case Movement::Left: return static_cast<Compass>((h + 3) % 4);
    case Movement::Right: return static_cast<Compass>((h + 1) % 4);
    }
    return heading;
}

/// The side a vehicle enters an intersection from.
constexpr Compass approach_of(Compass heading) noexcept { return opposite(heading); }

inline std::string_view to_string(Compass c)
{
    switch (c) {
    case Compass::West: return "W";
    case Compass::North: return "N";
    case Compass::East: return "E";
    case Compass::South: return "S";
    }
    return "?";
}

inline std::string_view to_string(Movement m)
{
    switch (m) {
    case Movement::Straight: return "straight";
    case Movement::Left: return "left";
    case Movement::Right: return "right";
    }
    return "?";
}

inline constexpr int intersection_count = 4;
inline constexpr int segments_per_link = 6;

enum class NodeKind : std::uint8_t { Entry, Intersection, Exit, NorthPortal, SouthPortal };

/// Node ids: 0 = W0, 1..4 = I1..I4, 5 = E5, 6..9 = N1..N4, 10..13 = S1..S4.
using NodeId = std::uint8_t;

inline constexpr NodeId entry_node = 0;
inline constexpr NodeId exit_node = 5;
inline constexpr NodeId node_count = 14;

constexpr NodeId intersection_node(int k) noexcept { return static_cast<NodeId>(k); }
constexpr NodeId north_portal(int k) noexcept { return static_cast<NodeId>(5 + k); }
constexpr NodeId south_portal(int k) noexcept { return static_cast<NodeId>(9 + k); }

constexpr NodeKind node_kind(NodeId n) noexcept
{
    if (n == entry_node) return NodeKind::Entry;
    if (n <= 4) return NodeKind::Intersection;
    if (n == exit_node) return NodeKind::Exit;
    if (n <= 9) return NodeKind::NorthPortal;
    return NodeKind::SouthPortal;
}

/// 1-based index k of an intersection or portal.
constexpr int node_column(NodeId n) noexcept
{
    switch (node_kind(n)) {
    case NodeKind::Intersection: return n;
    case NodeKind::NorthPortal: return n - 5;
    case NodeKind::SouthPortal: return n - 9;
    case NodeKind::Entry: return 0;
    case NodeKind::Exit: return 5;
    }
    return 0;
}

inline std::string node_name(NodeId n)
{
    switch (node_kind(n)) {
    case NodeKind::Entry: return "W0";
    case NodeKind::Exit: return "E5";
    case NodeKind::Intersection: return "I" + std::to_string(node_column(n));
    case NodeKind::NorthPortal: return "N" + std::to_string(node_column(n));
    case NodeKind::SouthPortal: return "S" + std::to_string(node_column(n));
    }
    return "?";
}

using LinkId = std::uint16_t;
using SegmentId = std::uint16_t;

/// Directed chain of road segments between two nodes.
struct Link {
    LinkId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    Compass heading = Compass::East;
    SegmentId first_segment = 0;
    int segment_count = 0;
};

/// The semi-closed four-intersection grid.
///
/// Corridor W0-I1-I2-I3-I4-E5, a branch from every intersection to its north
/// and south portal, and ring links between neighbouring portals on each side.
/// Every link carries six segments in each direction; the first segment out of
/// W0 is the unbounded entry queue, every other segment holds one vehicle.
class Network {
public:
    static Network build()
    {
        Network net;
        for (auto& row : net.outbound_) {
            row.fill(std::nullopt);
        }
        auto both = [&](NodeId a, NodeId b, Compass a_to_b) {
            net.add_link(a, b, a_to_b);
            net.add_link(b, a, opposite(a_to_b));
        };
        both(entry_node, intersection_node(1), Compass::East);
        for (int k = 1; k < intersection_count; ++k) {
            both(intersection_node(k), intersection_node(k + 1), Compass::East);
        }
        both(intersection_node(intersection_count), exit_node, Compass::East);
        for (int k = 1; k <= intersection_count; ++k) {
            both(intersection_node(k), north_portal(k), Compass::North);
            both(intersection_node(k), south_portal(k), Compass::South);
        }
        for (int k = 1; k < intersection_count; ++k) {
            both(north_portal(k), north_portal(k + 1), Compass::East);
            both(south_portal(k), south_portal(k + 1), Compass::East);
        }
        return net;
    }

    const std::vector<Link>& links() const noexcept { return links_; }
    const Link& link(LinkId id) const { return links_.at(id); }

    /// Link leaving `node` towards `direction`, if the node has one.
    std::optional<LinkId> outbound(NodeId node, Compass direction) const
    {
        return outbound_[node][static_cast<unsigned>(direction)];
    }

    std::optional<LinkId> find_link(NodeId from, NodeId to) const
    {
        for (const auto& l : links_) {
            if (l.from == from && l.to == to) {
                return l.id;
            }
        }
        return std::nullopt;
    }

    std::size_t segment_count() const noexcept { return segments_.size(); }
    des::Resource& segment(SegmentId id) { return segments_[id]; }
    const des::Resource& segment(SegmentId id) const { return segments_[id]; }
    LinkId segment_link(SegmentId id) const { return segment_link_[id]; }

    /// Sum of wait-queue lengths over every segment of a link.
    std::size_t queued_on(LinkId id) const
    {
        const Link& l = links_[id];
        std::size_t total = 0;
        for (int i = 0; i < l.segment_count; ++i) {
            total += segments_[l.first_segment + i].queue_length();
        }
        return total;
    }

    /// "I1>I2#3" style label used in traces.
    std::string segment_label(SegmentId id) const
    {
        const Link& l = links_[segment_link_[id]];
        return node_name(l.from) + ">" + node_name(l.to) + "#" + std::to_string(id - l.first_segment);
    }

    /// Diagnostic listing, one line per link: `from to heading segments`.
    void describe(std::ostream& os) const
    {
        for (const auto& l : links_) {
            os << node_name(l.from) << '\t' << node_name(l.to) << '\t' << to_string(l.heading) << '\t'
               << l.segment_count;
            if (segments_[l.first_segment].is_unbounded()) {
                os << "\tentry-unbounded";
            }
            os << '\n';
        }
    }

private:
    Network() = default;

    void add_link(NodeId from, NodeId to, Compass heading)
    {
        Link l;
        l.id = static_cast<LinkId>(links_.size());
        l.from = from;
        l.to = to;
        l.heading = heading;
        l.first_segment = static_cast<SegmentId>(segments_.size());
        l.segment_count = segments_per_link;
        for (int i = 0; i < segments_per_link; ++i) {
            if (from == entry_node && i == 0) {
                segments_.emplace_back(des::unbounded);
            } else {
                segments_.emplace_back(1);
            }
            segment_link_.push_back(l.id);
        }
        outbound_[from][static_cast<unsigned>(heading)] = l.id;
        links_.push_back(l);
    }

    std::vector<Link> links_;
    std::vector<des::Resource> segments_;
    std::vector<LinkId> segment_link_;
    std::array<std::array<std::optional<LinkId>, 4>, node_count> outbound_{};
};

} // namespace gridflow::traffic
