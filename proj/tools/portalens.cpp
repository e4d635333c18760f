// portalens command-line front end. Exit codes: 0 ok, 1 input error, 2 internal error.

#include "portalens/dataset.hpp"
#include "portalens/error.hpp"
#include "portalens/io/render.hpp"
#include "portalens/io/replay.hpp"
#include "portalens/io/selection_files.hpp"
#include "portalens/io/server.hpp"
#include "portalens/io/state_file.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>

using namespace portalens;

namespace {

Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->request_stop();
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

void print_warnings(const LoadReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_load(const std::string& csv) {
    LoadReport report;
    const Dataset ds = load_trajectories_file(csv, &report);
    print_warnings(report);
    std::cout << "trajectories\t" << ds.trajectory_count() << '\n'
              << "samples\t" << ds.sample_count() << '\n'
              << "segments\t" << ds.segment_count() << '\n';
    const char* names[] = {"x", "y", "t"};
    const Axis axes[] = {Axis::X, Axis::Y, Axis::T};
    for (int i = 0; i < 3; ++i)
        std::cout << "extent_" << names[i] << '\t' << format_real(ds.extent(axes[i]).min) << '\t'
                  << format_real(ds.extent(axes[i]).max) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"portalens: space-time cube portal engine"};
    app.require_subcommand(1);

    std::string csv, trace, out, tube_file, lassos_file, axis = "t", state_path;
    double filter = 0.0, fps = 30.0;
    int res = 64, cell_px = 1;
    std::uint64_t tour_id = 0;
    std::uint16_t port = 0;
    bool per_trajectory = false;

    auto* load = app.add_subcommand("load", "validate a trajectory CSV and report its size");
    load->add_option("csv", csv, "traj_id,x,y,t file")->required();

    auto* replay_cmd = app.add_subcommand("replay", "fold a trace through a session");
    replay_cmd->add_option("trace", trace)->required();
    replay_cmd->add_option("--data", csv)->required();
    replay_cmd->add_option("--out", out)->required();

    auto* select = app.add_subcommand("select", "run a tube or lasso query, print selection lines");
    select->add_option("--data", csv)->required();
    auto* tube_opt = select->add_option("--tube", tube_file);
    auto* lasso_opt = select->add_option("--lassos", lassos_file);
    tube_opt->excludes(lasso_opt);
    select->add_option("--filter", filter, "time filter in [0, 1]")->check(CLI::Range(0.0, 1.0));
    select->add_flag("--per-trajectory", per_trajectory, "intersection per trajectory instead of per sample");

    auto* heatmap = app.add_subcommand("heatmap", "project samples onto a cube face");
    heatmap->add_option("--data", csv)->required();
    heatmap->add_option("--axis", axis)->check(CLI::IsMember({"x", "y", "t"}, CLI::ignore_case));
    heatmap->add_option("--res", res)->check(CLI::Range(1, 4096));
    heatmap->add_option("--cell-px", cell_px)->check(CLI::Range(1, 64));
    heatmap->add_option("--out", out)->required();

    auto* tour = app.add_subcommand("tour", "tour tools");
    tour->require_subcommand(1);
    auto* render = tour->add_subcommand("render", "render a stored tour to numbered PPM frames");
    render->add_option("statefile", state_path)->required();
    render->add_option("tour_id", tour_id)->required();
    render->add_option("--fps", fps)->check(CLI::Range(1.0, 1000.0));
    render->add_option("--out", out)->required();
    render->add_option("--data", csv, "trajectories to draw (default: none)");

    auto* serve = app.add_subcommand("serve", "serve the wire protocol on 127.0.0.1");
    serve->add_option("--data", csv)->required();
    serve->add_option("--port", port)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*load) return cmd_load(csv);

        if (*replay_cmd) {
            const ReplayOutput r = replay(trace, csv, out);
            std::cerr << "replayed; " << std::count(r.effect_log.begin(), r.effect_log.end(), '\n')
                      << " effects written to " << out << '\n';
            return 0;
        }

        if (*select) {
            if (tube_file.empty() == lassos_file.empty()) throw InputError("give exactly one of --tube or --lassos");
            LoadReport report;
            const Dataset ds = load_trajectories_file(csv, &report);
            print_warnings(report);
            SelectOptions opt;
            opt.filter_value = filter;
            opt.intersect_mode = per_trajectory ? IntersectMode::PerTrajectory : IntersectMode::PerSample;
            SelectionResult result;
            if (!tube_file.empty()) {
                auto in = open_in(tube_file);
                result = tube_select(ds, read_tube(in), opt);
            } else {
                auto in = open_in(lassos_file);
                const auto lassos = read_lassos(in);
                result = lassos.size() == 1 ? lasso_select(ds, lassos.front(), opt)
                                            : intersect_select(ds, lassos, opt);
            }
            write_selection(std::cout, result);
            return 0;
        }

        if (*heatmap) {
            const Dataset ds = load_trajectories_file(csv);
            const Image img = render_heatmap(project_heatmap(ds, parse_axis(axis), res, res), cell_px);
            std::ofstream f(out, std::ios::binary);
            if (!f) throw InputError("cannot write '" + out + "'");
            write_ppm(f, img);
            return 0;
        }

        if (*render) {
            const Dataset ds = csv.empty() ? Dataset{} : load_trajectories_file(csv);
            const SessionSnapshot snap = read_state_file(state_path);
            const auto it = snap.tours.find(tour_id);
            if (it == snap.tours.end()) throw InputError("no tour " + std::to_string(tour_id) + " in " + state_path);
            const std::size_t n = render_tour(it->second, fps, ds, CameraParams{}, out);
            std::cerr << n << " frames written to " << out << '\n';
            return 0;
        }

        if (*serve) {
            auto ds = std::make_shared<const Dataset>(load_trajectories_file(csv));
            Server server(ds, EngineConfig{}, port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
            server.run();
            g_server = nullptr;
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
