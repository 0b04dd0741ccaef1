// evrep: command-line front end for the event-representation library.
// Subcommands: synth, repr, aplof, traj, bench, viz.
// Exit codes: 0 success, 2 usage or input-parse errors, 3 domain errors.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evrep/aplof.hpp"
#include "evrep/bench.hpp"
#include "evrep/event_io.hpp"
#include "evrep/image.hpp"
#include "evrep/representations.hpp"
#include "evrep/synth.hpp"
#include "evrep/tensor.hpp"
#include "evrep/trajectory.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

int exit_code_for(const evrep::Error& error) {
    using namespace evrep;
    if (dynamic_cast<const DegenerateWindow*>(&error) || dynamic_cast<const DegenerateStream*>(&error)
        || dynamic_cast<const EmptyScene*>(&error) || dynamic_cast<const NoValidPixels*>(&error)
        || dynamic_cast<const EmptyIterates*>(&error) || dynamic_cast<const TauOutOfRange*>(&error)
        || dynamic_cast<const Underdetermined*>(&error) || dynamic_cast<const DimMismatch*>(&error)) {
        return kExitDomain;
    }
    // malformed files, bad flags, bad thresholds: usage class
    return kExitUsage;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        values.push_back(std::stod(item));
    }
    return values;
}

std::string strip_extension(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    const std::size_t slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path;
    }
    return path.substr(0, dot);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string scene_path;
    std::uint64_t seed = 0;
    std::string events_path;
    std::string flows;
    std::string flow_prefix;
    std::string trajectory_path;
    std::size_t degree = 10;
    std::size_t samples = 10;
};

int run_synth(const SynthArgs& args) {
    const evrep::SyntheticScene scene = evrep::parse_scene_file(args.scene_path);
    const evrep::EventStream stream = evrep::emit_events(scene, args.seed);
    evrep::write_events_file(args.events_path, stream);
    std::cout << "events: " << args.events_path << " (" << stream.size() << " events)\n";

    const evrep::GroundTruth gt = evrep::ground_truth(scene);
    if (!args.flows.empty()) {
        const std::vector<double> taus = parse_double_list(args.flows);
        const std::string prefix =
            args.flow_prefix.empty() ? strip_extension(args.events_path) + "_flow"
                                     : args.flow_prefix;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const std::string path = prefix + std::to_string(i) + ".flw";
            evrep::write_flow_field(path, gt.flow_at(taus[i]));
            std::cout << "flow: " << path << " (tau = " << taus[i] << " s)\n";
        }
    }
    if (!args.trajectory_path.empty()) {
        const double duration = static_cast<double>(scene.window.duration_us()) * 1e-6;
        evrep::TrajectoryGroundTruth traj;
        for (std::size_t k = 1; k <= args.samples; ++k) {
            const double tau = static_cast<double>(k) / static_cast<double>(args.samples);
            traj.times.push_back(tau);
            traj.flows.push_back(gt.flow_at(tau * duration));
        }
        const evrep::BezierTrajectoryField field =
            evrep::fit_bezier(traj, args.degree, scene.window.t_start, scene.window.t_end);
        evrep::write_bezier_field(args.trajectory_path, field);
        std::cout << "trajectory: " << args.trajectory_path << " (degree " << args.degree
                  << ", " << args.samples << " samples)\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// repr

struct ReprArgs {
    std::string events_path;
    std::string kind;
    std::optional<std::size_t> bins;
    std::optional<std::size_t> depth;
    std::optional<std::uint64_t> t0;
    std::optional<std::uint64_t> t1;
    std::string future_mode = "earliest";
    std::optional<std::uint32_t> width;
    std::optional<std::uint32_t> height;
    std::string out_path;
};

int run_repr(const ReprArgs& args) {
    const bool needs_bins = args.kind == "labits" || args.kind == "voxel";
    const bool needs_depth = args.kind == "tore";
    if (needs_bins && !args.bins) {
        std::cerr << "error: --kind " << args.kind << " requires --bins\n";
        return kExitUsage;
    }
    if (needs_depth && !args.depth) {
        std::cerr << "error: --kind tore requires --depth\n";
        return kExitUsage;
    }
    if (!needs_bins && args.bins) {
        std::cerr << "error: --bins does not apply to --kind " << args.kind << "\n";
        return kExitUsage;
    }
    if (!needs_depth && args.depth) {
        std::cerr << "error: --depth does not apply to --kind " << args.kind << "\n";
        return kExitUsage;
    }
    if (args.t0.has_value() != args.t1.has_value()) {
        std::cerr << "error: --t0 and --t1 must be given together\n";
        return kExitUsage;
    }
    if (args.width.has_value() != args.height.has_value()) {
        std::cerr << "error: --width and --height must be given together\n";
        return kExitUsage;
    }
    const bool windowed = args.kind == "labits" || args.kind == "voxel" || args.kind == "tore"
                       || args.kind == "ts";
    if (args.t0 && !windowed) {
        std::cerr << "error: --t0/--t1 do not apply to --kind " << args.kind << "\n";
        return kExitUsage;
    }

    std::optional<evrep::SensorGeometry> geometry;
    if (args.width && args.height) {
        geometry = evrep::SensorGeometry{static_cast<std::uint16_t>(*args.width),
                                         static_cast<std::uint16_t>(*args.height)};
    }
    const evrep::EventStream stream = evrep::read_events_file(args.events_path, geometry);
    std::optional<evrep::TimeWindow> window;
    if (args.t0) {
        window = evrep::TimeWindow(*args.t0, *args.t1);
    }

    evrep::DenseTensor tensor(1, 1, 1);
    if (args.kind == "labits") {
        evrep::LabitsConfig config{*args.bins, window};
        config.future_mode = args.future_mode == "latest" ? evrep::FutureMode::latest_overwrite
                                                          : evrep::FutureMode::earliest;
        tensor = evrep::build_labits(stream, config);
    } else if (args.kind == "voxel") {
        tensor = evrep::build_voxel_grid(stream, evrep::VoxelConfig{*args.bins, window});
    } else if (args.kind == "tore") {
        tensor = evrep::build_tore(stream, evrep::ToreConfig{*args.depth, window});
    } else if (args.kind == "ts") {
        tensor = evrep::build_time_surface(
            stream, window ? *window : evrep::natural_window(stream));
    } else if (args.kind == "frame") {
        tensor = evrep::build_event_frame(stream);
    } else if (args.kind == "count") {
        tensor = evrep::build_event_count(stream);
    } else {
        std::cerr << "error: unknown --kind " << args.kind << "\n";
        return kExitUsage;
    }
    evrep::write_dense_tensor(args.out_path, tensor);
    std::cout << args.out_path << ": " << tensor.channels() << "x" << tensor.height() << "x"
              << tensor.width() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// aplof

struct AplofArgs {
    std::string labits_path;
    std::size_t layer = 0;
    double tau_range = 0.0;
    double beta = 0.3;
    int patch = 5;
    int min_support = 6;
    std::string out_path;
    std::string gt_path;
    bool json_lines = false;
};

int run_aplof(const AplofArgs& args) {
    const evrep::DenseTensor tensor = evrep::read_dense_tensor(args.labits_path);
    if (args.layer >= tensor.channels()) {
        std::cerr << "error: --layer " << args.layer << " out of range (tensor has "
                  << tensor.channels() << " layers)\n";
        return kExitUsage;
    }
    const evrep::DenseTensor layer = evrep::extract_layer(tensor, args.layer);
    const evrep::FlowField flow = evrep::aplof_from_labits(layer, args.tau_range, args.beta,
                                                           args.patch, args.min_support);
    if (!args.out_path.empty()) {
        evrep::write_flow_field(args.out_path, flow);
    }
    char line[256];
    if (!args.gt_path.empty()) {
        const evrep::FlowField gt = evrep::read_flow_field(args.gt_path);
        const double l1 = evrep::mean_l1(flow, gt);
        if (args.json_lines) {
            std::snprintf(line, sizeof(line),
                          "{\"valid_pixels\":%zu,\"mean_l1\":%.9g}\n", flow.valid_count(), l1);
        } else {
            std::snprintf(line, sizeof(line), "valid pixels: %zu  mean L1 vs gt: %.4f\n",
                          flow.valid_count(), l1);
        }
    } else {
        if (args.json_lines) {
            std::snprintf(line, sizeof(line), "{\"valid_pixels\":%zu}\n", flow.valid_count());
        } else {
            std::snprintf(line, sizeof(line), "valid pixels: %zu\n", flow.valid_count());
        }
    }
    std::cout << line;
    return 0;
}

// ---------------------------------------------------------------------------
// traj

struct TrajArgs {
    std::string pred_path;
    std::string gt_flows;
    std::string times;
    bool json_lines = false;
};

int run_traj(const TrajArgs& args) {
    const evrep::BezierTrajectoryField pred = evrep::read_bezier_field(args.pred_path);
    evrep::TrajectoryGroundTruth gt;
    gt.times = parse_double_list(args.times);
    std::stringstream ss(args.gt_flows);
    std::string path;
    while (std::getline(ss, path, ',')) {
        gt.flows.push_back(evrep::read_flow_field(path));
    }
    const evrep::TrajectoryMetrics traj = evrep::trajectory_metrics(pred, gt);
    const evrep::TwoViewMetrics endpoint =
        evrep::two_view_metrics(evrep::bezier_eval(pred, gt.times.back()), gt.flows.back());
    char line[256];
    if (args.json_lines) {
        std::snprintf(line, sizeof(line),
                      "{\"tepe\":%.9g,\"tae\":%.9g,\"epe\":%.9g,\"ae\":%.9g}\n", traj.tepe,
                      traj.tae_degrees, endpoint.epe, endpoint.ae_degrees);
    } else {
        std::snprintf(line, sizeof(line), "TEPE %.4f  TAE %.4f  EPE %.4f  AE %.4f\n", traj.tepe,
                      traj.tae_degrees, endpoint.epe, endpoint.ae_degrees);
    }
    std::cout << line;
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::size_t packets = 50;
    std::uint64_t duration_ms = 100;
    int repeats = 3;
    std::size_t labits_bins = 65;
    std::size_t voxel_bins = 65;
    std::size_t tore_depth = 3;
    std::uint64_t seed = 0;
    std::uint32_t width = 240;
    std::uint32_t height = 180;
    bool parallel = false;
    bool json_lines = false;
};

/// Random desk-scale packets: a few edges at mixed speeds plus hot pixels.
std::vector<evrep::EventStream> make_bench_packets(const BenchArgs& args) {
    std::vector<evrep::EventStream> packets;
    evrep::SplitMix64 rng(args.seed);
    for (std::size_t i = 0; i < args.packets; ++i) {
        evrep::SyntheticScene scene{
            evrep::SensorGeometry{static_cast<std::uint16_t>(args.width),
                                  static_cast<std::uint16_t>(args.height)},
            evrep::TimeWindow(0, args.duration_ms * 1000),
            {},
            {}};
        const double duration_s = static_cast<double>(args.duration_ms) * 1e-3;
        const int edges = 6 + static_cast<int>(rng.next() % 5);
        for (int e = 0; e < edges; ++e) {
            const double x0 = rng.next_double() * (args.width / 2.0);
            // fast enough to cross a few hundred columns over the packet
            const double vx = (0.2 + 0.8 * rng.next_double()) * args.width / duration_s / 2.0;
            scene.objects.push_back(
                {evrep::VerticalEdge{x0}, evrep::MotionModel::constant_velocity(vx, 0.0)});
        }
        for (int h = 0; h < 4; ++h) {
            scene.hot_pixels.push_back(
                {static_cast<std::uint16_t>(rng.next() % args.width),
                 static_cast<std::uint16_t>(rng.next() % args.height),
                 2000.0 + 2000.0 * rng.next_double()});
        }
        packets.push_back(evrep::emit_events(scene, rng.next()));
    }
    return packets;
}

int run_bench_cmd(const BenchArgs& args) {
    if (args.packets == 0) {
        std::cerr << "error: --packets must be >= 1\n";
        return kExitUsage;
    }
    const std::vector<evrep::EventStream> packets = make_bench_packets(args);
    evrep::BenchConfig config;
    config.packet_count = args.packets;
    config.packet_duration_us = args.duration_ms * 1000;
    config.repeats = args.repeats;
    config.labits_bins = args.labits_bins;
    config.voxel_bins = args.voxel_bins;
    config.tore_depth = args.tore_depth;
    config.parallel = args.parallel;
    const evrep::BenchReport report = evrep::run_bench(packets, config);
    if (args.json_lines) {
        std::cout << report.records();
    } else {
        std::cout << report.machine << ", " << args.packets << " packets x " << args.duration_ms
                  << " ms\n"
                  << report.table() << "\n"
                  << report.records();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// viz

struct VizArgs {
    std::string tensor_path;
    std::size_t layer = 0;
    std::string colormap = "gray";
    bool minmax = false;
    std::string out_path;
};

int run_viz(const VizArgs& args) {
    const evrep::DenseTensor tensor = evrep::read_dense_tensor(args.tensor_path);
    if (args.layer >= tensor.channels()) {
        std::cerr << "error: --layer " << args.layer << " out of range (tensor has "
                  << tensor.channels() << " layers)\n";
        return kExitUsage;
    }
    const evrep::Image image = evrep::render_layer(
        tensor, args.layer,
        args.colormap == "viridis" ? evrep::Colormap::viridis : evrep::Colormap::gray,
        args.minmax ? evrep::RangeMode::min_max : evrep::RangeMode::fixed_unit);
    evrep::write_pnm(args.out_path, image);
    std::cout << args.out_path << ": " << image.width << "x" << image.height
              << (image.channels == 1 ? " P5" : " P6") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event stream representations, local-flow estimation and trajectory metrics"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "emit events and ground truth from a scene file");
    synth->add_option("scene", synth_args.scene_path, "scene description file")->required();
    synth->add_option("--seed", synth_args.seed, "hot-pixel noise seed");
    synth->add_option("--events", synth_args.events_path,
                      "output events path (.csv or binary)")->required();
    synth->add_option("--flows", synth_args.flows,
                      "comma-separated taus (seconds from window start) for ground-truth flows");
    synth->add_option("--flow-prefix", synth_args.flow_prefix, "flow output prefix");
    synth->add_option("--trajectory", synth_args.trajectory_path,
                      "output trajectory field fitted to the analytic ground truth");
    synth->add_option("--degree", synth_args.degree, "trajectory fit degree (default 10)");
    synth->add_option("--samples", synth_args.samples, "trajectory fit sample count (default 10)");

    ReprArgs repr_args;
    CLI::App* repr = app.add_subcommand("repr", "build a dense representation tensor");
    repr->add_option("events", repr_args.events_path, "input events file")->required();
    repr->add_option("--kind", repr_args.kind, "labits|voxel|tore|ts|frame|count")->required();
    repr->add_option("--bins", repr_args.bins, "bin count (labits, voxel)");
    repr->add_option("--depth", repr_args.depth, "stack depth (tore)");
    repr->add_option("--t0", repr_args.t0, "explicit window start (us)");
    repr->add_option("--t1", repr_args.t1, "explicit window end (us)");
    repr->add_option("--future-mode", repr_args.future_mode,
                     "earliest|latest future-event selection (labits)");
    repr->add_option("--width", repr_args.width, "sensor width for bare CSV input");
    repr->add_option("--height", repr_args.height, "sensor height for bare CSV input");
    repr->add_option("-o,--out", repr_args.out_path, "output tensor path")->required();

    AplofArgs aplof_args;
    CLI::App* aplof = app.add_subcommand("aplof", "estimate local flow from one layer");
    aplof->add_option("labits", aplof_args.labits_path, "input layered tensor")->required();
    aplof->add_option("--layer", aplof_args.layer, "layer index")->required();
    aplof->add_option("--tau-range", aplof_args.tau_range, "probe spacing in seconds")->required();
    aplof->add_option("--beta", aplof_args.beta, "active-pixel threshold (default 0.3)");
    aplof->add_option("--patch", aplof_args.patch, "plane-fit patch size (odd, default 5)");
    aplof->add_option("--min-support", aplof_args.min_support,
                      "minimum active neighbors (default 6)");
    aplof->add_option("-o,--out", aplof_args.out_path, "output flow path");
    aplof->add_option("--gt", aplof_args.gt_path, "ground-truth flow for the printed L1 summary");
    aplof->add_flag("--json-lines", aplof_args.json_lines, "structured output");

    TrajArgs traj_args;
    CLI::App* traj = app.add_subcommand("traj", "trajectory and endpoint metrics");
    traj->add_option("pred", traj_args.pred_path, "predicted trajectory field")->required();
    traj->add_option("--gt", traj_args.gt_flows, "comma-separated ground-truth flows")->required();
    traj->add_option("--times", traj_args.times,
                     "comma-separated normalized evaluation times")->required();
    traj->add_flag("--json-lines", traj_args.json_lines, "structured output");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "time every builder on synthetic packets");
    bench->add_option("--packets", bench_args.packets, "packet count (default 50)");
    bench->add_option("--duration-ms", bench_args.duration_ms, "packet duration (default 100)");
    bench->add_option("--repeats", bench_args.repeats, "timed repeats per packet (default 3)");
    bench->add_option("--labits-bins", bench_args.labits_bins, "default 65");
    bench->add_option("--voxel-bins", bench_args.voxel_bins, "default 65");
    bench->add_option("--tore-depth", bench_args.tore_depth, "default 3");
    bench->add_option("--seed", bench_args.seed, "packet generation seed");
    bench->add_option("--width", bench_args.width, "sensor width (default 240)");
    bench->add_option("--height", bench_args.height, "sensor height (default 180)");
    bench->add_flag("--parallel", bench_args.parallel,
                    "also time the layered builder with internal parallelism");
    bench->add_flag("--json-lines", bench_args.json_lines, "records only");

    VizArgs viz_args;
    CLI::App* viz = app.add_subcommand("viz", "dump one tensor layer as a portable pixmap");
    viz->add_option("tensor", viz_args.tensor_path, "input tensor")->required();
    viz->add_option("--layer", viz_args.layer, "layer index")->required();
    viz->add_option("--colormap", viz_args.colormap, "gray|viridis (default gray)");
    viz->add_flag("--minmax", viz_args.minmax,
                  "stretch the layer's own range instead of the fixed [-1, 1] map");
    viz->add_option("-o,--out", viz_args.out_path, "output image path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) {
            return run_synth(synth_args);
        }
        if (repr->parsed()) {
            return run_repr(repr_args);
        }
        if (aplof->parsed()) {
            return run_aplof(aplof_args);
        }
        if (traj->parsed()) {
            return run_traj(traj_args);
        }
        if (bench->parsed()) {
            return run_bench_cmd(bench_args);
        }
        if (viz->parsed()) {
            return run_viz(viz_args);
        }
    } catch (const evrep::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
