#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>

#include "gridflow/des/calendar.hpp"

namespace gridflow::des {

/// Formats a double with the shortest representation that round-trips.
inline std::string format_real(double value)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

/// Optional event trace: one event per line, tab separated
/// `time_s  event_kind  entity_id  location_id`. Disabled when no stream is
/// attached.
class TraceSink {
public:
    TraceSink() = default;
    explicit TraceSink(std::ostream* out) : out_(out) {}

    bool enabled() const noexcept { return out_ != nullptr; }

    void emit(SimTime time, std::string_view kind, std::string_view entity, std::string_view location)
    {
        if (!out_) {
            return;
        }
        *out_ << format_real(time) << '\t' << kind << '\t' << entity << '\t' << location << '\n';
    }

private:
    std::ostream* out_ = nullptr;
};

} // namespace gridflow::des
