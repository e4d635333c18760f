#pragma once

// Newline-delimited JSON session protocol. One WireSession per connection;
// each owns its Engine.

#include "portalens/engine.hpp"

#include "json.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace portalens {

inline constexpr int kWireVersion = 1;

/// Event as a wire message: {"type":"event","t_ms":..,"event":"POSE",...fields}.
nlohmann::json event_to_json(const InputEvent& e);
/// Throws InputError for unknown events or missing/ill-typed fields.
InputEvent event_from_json(const nlohmann::json& j);

std::string base64_encode(std::string_view bytes);

struct WireReply {
    std::vector<std::string> lines; ///< each a complete JSON document, no newline
    bool close = false;
};

class WireSession {
public:
    WireSession(std::shared_ptr<const Dataset> dataset, EngineConfig cfg = {});

    /// Handles one request line. Never throws for bad input: malformed or
    /// unknown messages yield an error reply and the session stays usable.
    WireReply handle(std::string_view line);

    const Engine& engine() const { return engine_; }

private:
    nlohmann::json query(const nlohmann::json& req);
    nlohmann::json render_state() const;

    Engine engine_;
};

} // namespace portalens
