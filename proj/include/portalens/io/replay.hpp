#pragma once

#include "portalens/engine.hpp"

#include <memory>
#include <string>
#include <vector>

namespace portalens {

/// Everything a replay writes, as bytes.
struct ReplayOutput {
    std::string effect_log; ///< one format_effect line per effect
    std::string state;      ///< StateFile text
    std::string frame;      ///< final view as PPM
    std::vector<std::string> recordings; ///< trace text per RECORD_START..STOP
};

/// Folds the events through a fresh Engine in order.
ReplayOutput replay_events(std::shared_ptr<const Dataset> dataset, const std::vector<InputEvent>& events,
                           const EngineConfig& cfg = {});

/// Writes effects.log, state.txt, final.ppm and recording_<n>.trace into out_dir.
ReplayOutput replay(const std::string& trace_path, const std::string& dataset_path,
                    const std::string& out_dir, const EngineConfig& cfg = {});

} // namespace portalens
