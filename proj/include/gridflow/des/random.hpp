#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "gridflow/des/fault.hpp"

namespace gridflow::des {

/// What a stream is used for. Every purpose gets its own generator state.
enum class StreamPurpose : std::uint8_t {
    ArrivalsGT,
    ArrivalsFT,
    SegmentDelay,
    LightPhase,
    BoundaryChoice,
    GtTurnChoice,
};

inline std::string_view to_string(StreamPurpose p)
{
    switch (p) {
    case StreamPurpose::ArrivalsGT: return "arrivals-gt";
    case StreamPurpose::ArrivalsFT: return "arrivals-ft";
    case StreamPurpose::SegmentDelay: return "segment-delay";
    case StreamPurpose::LightPhase: return "light-phase";
    case StreamPurpose::BoundaryChoice: return "boundary-choice";
    case StreamPurpose::GtTurnChoice: return "gt-turn-choice";
    }
    return "unknown";
}

struct StreamId {
    std::uint64_t scenario = 0;
    std::uint64_t replication = 0;
    StreamPurpose purpose = StreamPurpose::ArrivalsGT;
    friend bool operator==(const StreamId&, const StreamId&) = default;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Derives a 64-bit seed from (base seed, scenario, replication, purpose).
/// Each component is absorbed through a splitmix64 round, so neighbouring
/// tuples land far apart.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, const StreamId& id) noexcept
{
    std::uint64_t h = detail::splitmix64(base_seed);
    h = detail::splitmix64(h ^ id.scenario);
    h = detail::splitmix64(h ^ (id.replication + 0x51ed270b27a3c8f1ULL));
    h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(id.purpose) + 0x2545f4914f6cdd1dULL));
    return h;
}

/// Reproducible random stream. Uniform variates are built from the raw 64-bit
/// engine output so sample paths do not depend on the standard library's
/// distribution implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t base_seed, StreamId id)
        : id_(id), engine_(derive_seed(base_seed, id))
    {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)); }

    const StreamId& id() const noexcept { return id_; }

private:
    StreamId id_;
    std::mt19937_64 engine_;
};

struct Constant {
    double value;
};
struct Uniform {
    double lo;
    double hi;
};
struct Exponential {
    double mean;
};
struct Bernoulli {
    double p;
};

/// Validated sampling distribution. Parameters are checked once, here.
class Distribution {
public:
    using Kind = std::variant<Constant, Uniform, Exponential, Bernoulli>;

    static Distribution constant(double c) { return Distribution(Constant{c}); }

    static Distribution uniform(double lo, double hi)
    {
        if (!(lo < hi)) {
            throw ConfigError("uniform", "requires lo < hi");
        }
        return Distribution(Uniform{lo, hi});
    }

    static Distribution exponential(double mean)
    {
        if (!(mean > 0.0) || !std::isfinite(mean)) {
            throw ConfigError("exponential", "requires mean > 0");
        }
        return Distribution(Exponential{mean});
    }

    static Distribution bernoulli(double p)
    {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("bernoulli", "requires 0 <= p <= 1");
        }
        return Distribution(Bernoulli{p});
    }

    double sample(RandomStream& stream) const
    {
        return std::visit(
            [&](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    return d.value;
                } else if constexpr (std::is_same_v<T, Uniform>) {
                    const double x = d.lo + (d.hi - d.lo) * stream.uniform01();
                    // lo + span*u can round up to hi
                    return x < d.hi ? x : std::nextafter(d.hi, d.lo);
                } else if constexpr (std::is_same_v<T, Exponential>) {
                    return -d.mean * std::log(stream.uniform_open01());
                } else {
                    return stream.uniform01() < d.p ? 1.0 : 0.0;
                }
            },
            kind_);
    }

    const Kind& kind() const noexcept { return kind_; }

private:
    explicit Distribution(Kind k) : kind_(k) {}
    Kind kind_;
};

} // namespace gridflow::des
