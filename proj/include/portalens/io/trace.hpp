#pragma once

#include "portalens/session.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace portalens {

inline constexpr std::string_view kTraceHeader = "PORTALENS-TRACE v1";

/// Trace name of the event kind, e.g. "CLUTCH_DOWN".
std::string_view event_name(const EventPayload& p);

/// One trace line without terminator: `t_ms<TAB>NAME[<TAB>field...]`.
std::string format_event(const InputEvent& e);
/// Inverse of format_event. Throws InputError.
InputEvent parse_event(std::string_view line);

/// Throws ParseError (with the 1-based line number) on a bad header, unknown
/// event name, malformed field or decreasing timestamp.
std::vector<InputEvent> read_trace(std::istream& in);
std::vector<InputEvent> read_trace_file(const std::string& path);

void write_trace(std::ostream& out, const std::vector<InputEvent>& events);

} // namespace portalens
