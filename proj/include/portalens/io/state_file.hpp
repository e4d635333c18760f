#pragma once

#include "portalens/engine.hpp"

#include <iosfwd>
#include <string>

namespace portalens {

inline constexpr std::string_view kStateHeader = "PORTALENS-STATE v1";

/// Text persistence of a session: SESSION, BOOKMARKS, PINS, STROKES and TOURS
/// sections, tab-separated, reals at 17 significant digits. Transient input
/// (an in-progress pinch gesture, lasso or pen stroke) is not stored.
void write_state(std::ostream& out, const SessionSnapshot& s);
std::string format_state(const SessionSnapshot& s);

/// Throws ParseError with the line number. When `ds` is given a stored path
/// lock is rebuilt from its trajectory; otherwise the lock is kept only as a
/// LockRecord in the result.
SessionSnapshot read_state(std::istream& in, const Dataset* ds = nullptr);
SessionSnapshot read_state_file(const std::string& path, const Dataset* ds = nullptr);

} // namespace portalens
