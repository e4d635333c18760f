#include "portalens/io/replay.hpp"

#include "portalens/error.hpp"
#include "portalens/io/state_file.hpp"
#include "portalens/io/trace.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace portalens {

ReplayOutput replay_events(std::shared_ptr<const Dataset> dataset, const std::vector<InputEvent>& events,
                           const EngineConfig& cfg) {
    Engine engine(std::move(dataset), cfg);
    for (const auto& e : events) engine.dispatch(e);

    ReplayOutput out;
    for (const auto& e : engine.effect_log()) {
        out.effect_log += format_effect(e);
        out.effect_log += '\n';
    }
    out.state = format_state(engine.snapshot());
    out.frame = to_ppm(engine.render());
    for (const auto& rec : engine.recordings()) {
        std::ostringstream os;
        write_trace(os, rec.events);
        out.recordings.push_back(os.str());
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write " + p.string());
    f.write(bytes.data(), std::streamsize(bytes.size()));
}

} // namespace

ReplayOutput replay(const std::string& trace_path, const std::string& dataset_path,
                    const std::string& out_dir, const EngineConfig& cfg) {
    const auto events = read_trace_file(trace_path);
    auto ds = std::make_shared<const Dataset>(load_trajectories_file(dataset_path));
    ReplayOutput out = replay_events(std::move(ds), events, cfg);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "effects.log", out.effect_log);
    write_file(dir / "state.txt", out.state);
    write_file(dir / "final.ppm", out.frame);
    for (std::size_t i = 0; i < out.recordings.size(); ++i)
        write_file(dir / ("recording_" + std::to_string(i + 1) + ".trace"), out.recordings[i]);
    return out;
}

} // namespace portalens
