// t2h: run, replay and inspect simulated teleoperation sessions.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "t2h/errors.hpp"
#include "t2h/grasp_sim.hpp"
#include "t2h/metrics.hpp"
#include "t2h/protocol.hpp"
#include "t2h/replay_log.hpp"
#include "t2h/script.hpp"
#include "t2h/server.hpp"
#include "t2h/session.hpp"
#include "t2h/session_config.hpp"
#include "t2h/tactile_pipeline.hpp"

namespace {

using nlohmann::json;
using namespace t2h;

constexpr int kExitError = 1;
constexpr int kExitMismatch = 3;

volatile std::sig_atomic_t g_interrupted = 0;

session::SessionConfig base_config(const std::string& path) {
  return path.empty() ? session::SessionConfig{} : session::load_config(path);
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

int run_serve(const std::string& config_path, int port, std::optional<std::uint64_t> seed,
              net::ServerOptions options) {
  auto config = base_config(config_path);
  if (seed) config.seed = *seed;
  options.port = static_cast<std::uint16_t>(port);
  net::Server server(config, options);
  const auto bound = server.start();
  std::cerr << "t2h: serving on " << options.bind_address << ":" << bound << " at " << config.tick_rate_hz
            << " Hz, object " << config.object << "\n";

  std::signal(SIGINT, [](int) { g_interrupted = 1; });
  std::signal(SIGTERM, [](int) { g_interrupted = 1; });
  while (!g_interrupted) {
    const auto before = server.stats().ticks;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    if (options.max_ticks && server.stats().ticks >= *options.max_ticks && before == server.stats().ticks) break;
  }
  server.stop();
  const auto s = server.stats();
  std::cout << json{{"ticks", s.ticks},
                    {"clients", s.clients_connected},
                    {"inputs", s.inputs_received},
                    {"controls", s.controls_received},
                    {"rejected_messages", s.rejected_messages},
                    {"dropped_outbound", s.dropped_outbound}}
                   .dump()
            << '\n';
  return 0;
}

int run_replay(const std::string& log_path, const std::string& config_path, const std::string& metrics_out) {
  const auto log = session::read_log(log_path);
  std::optional<session::SessionConfig> override_config;
  if (!config_path.empty()) override_config = session::load_config(config_path);
  const auto result = session::replay(log, override_config);

  json summary{{"ticks", result.run.telemetry.size()},
               {"recorded_sha256", log.telemetry_sha256},
               {"replayed_sha256", result.run.telemetry_sha256},
               {"match", result.hash_matches}};
  if (result.first_divergent_tick) summary["first_divergent_tick"] = *result.first_divergent_tick;
  if (result.run.metrics) summary["metrics"] = session::metrics_to_json(*result.run.metrics);
  if (!metrics_out.empty() && result.run.metrics) {
    write_json_file(metrics_out, session::metrics_to_json(*result.run.metrics));
  }
  std::cout << summary.dump() << '\n';
  return result.hash_matches ? 0 : kExitMismatch;
}

struct SimulateArgs {
  std::string script;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string pa;
  std::string metrics_out;
  std::string log_out;
  bool record_frames = false;
  std::string wire_out;
};

int run_simulate(const SimulateArgs& args) {
  const auto script = session::load_script(args.script);
  auto config = session::apply_overrides(base_config(args.config), script.config);
  if (args.seed) config.seed = *args.seed;
  if (args.pa == "on") config.partial_autonomy = true;
  if (args.pa == "off") config.partial_autonomy = false;

  std::optional<session::LogWriter> log;
  if (!args.log_out.empty()) log.emplace(args.log_out, config, "script:" + script.name, args.record_frames);
  std::optional<std::ofstream> wire;
  if (!args.wire_out.empty()) {
    wire.emplace(args.wire_out);
    if (!*wire) throw std::runtime_error("cannot write " + args.wire_out);
  }

  session::ScriptedOperator source(script);
  const auto result = session::run_session(
      config, source, [&](const session::OperatorTick& op, const session::TelemetryRecord& rec, const session::Session& s) {
        if (log) log->write(op, rec, s);
        if (!wire) return;
        if (op.input) *wire << net::input_message(*op.input).dump() << '\n';
        for (const auto& c : op.controls) *wire << net::control_message(c).dump() << '\n';
        *wire << net::telemetry_message(rec).dump() << '\n';
        if (config.tactile_stream_every > 0 && rec.tick % static_cast<std::uint64_t>(config.tactile_stream_every) == 0) {
          const auto shape = s.simulator().frame_shape();
          for (int k = 0; k < 2; ++k) {
            net::TactileMessage m{rec.tick, k + 1, shape.width, shape.height, s.last_frames()[static_cast<std::size_t>(k)]};
            *wire << net::tactile_message(m).dump() << '\n';
          }
        }
      });
  if (log) log->close();

  json summary{{"script", script.name},
               {"ticks", result.telemetry.size()},
               {"partial_autonomy", config.partial_autonomy},
               {"seed", config.seed},
               {"telemetry_sha256", result.telemetry_sha256}};
  if (result.metrics) {
    summary["metrics"] = session::metrics_to_json(*result.metrics);
    if (!args.metrics_out.empty()) write_json_file(args.metrics_out, session::metrics_to_json(*result.metrics));
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

int run_calibrate_demo(const std::string& config_path, std::optional<std::uint64_t> seed, int trials) {
  auto config = base_config(config_path);
  if (seed) config.seed = *seed;
  const sim::Simulator simulator(config.physics_config(), config.render_config(), config.resolve_object());
  auto world = simulator.initial_state(config.seed);

  json report = json::object();
  for (int sensor = 1; sensor <= 2; ++sensor) {
    std::vector<TactileFrame> frames;
    for (int k = 0; k < config.calibration_frames; ++k) {
      world.tick = static_cast<std::uint64_t>(k);
      frames.push_back(simulator.render(world, sensor));
    }
    const auto cal = tactile::calibrate(frames, config.reference_frames);

    // Fresh no-contact frames streamed through the windowed detector.
    tactile::VariationTracker tracker(cal, config.window_length);
    int nonzero = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      world.tick = static_cast<std::uint64_t>(config.calibration_frames + t);
      const auto r = tracker.observe(simulator.render(world, sensor).image);
      if (r.ratio > 0.0) ++nonzero;
      worst = std::max(worst, r.ratio);
    }
    report["sensor" + std::to_string(sensor)] = json{{"noise_threshold", cal.noise_threshold},
                                                     {"frames", config.calibration_frames},
                                                     {"reference_frames", config.reference_frames},
                                                     {"trials", trials},
                                                     {"nonzero_ratio_trials", nonzero},
                                                     {"max_ratio", worst}};
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-free tactile-to-haptic teleoperation sessions"};
  app.require_subcommand(1);

  std::string config_path;
  int port = 7878;
  std::optional<std::uint64_t> seed;
  net::ServerOptions server_options;
  std::string log_out;
  std::optional<std::uint64_t> max_ticks;
  auto* serve = app.add_subcommand("serve", "Run a live session over TCP");
  serve->add_option("--config", config_path, "Session config (YAML or JSON)")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port, 0 for any")->check(CLI::Range(0, 65535));
  serve->add_option("--seed", seed, "Override the config seed");
  serve->add_option("--bind", server_options.bind_address, "Bind address");
  serve->add_option("--log-out", log_out, "Record the session log here");
  serve->add_flag("--record-frames", server_options.record_frames, "Store frames next to the log");
  serve->add_option("--max-ticks", max_ticks, "Stop after this many ticks");
  serve->add_option("--input-hold-ticks", server_options.input_hold_ticks, "Ticks an input stays fresh")
      ->check(CLI::PositiveNumber);

  std::string replay_log;
  std::string replay_config;
  std::string replay_metrics;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded session and compare telemetry");
  replay->add_option("--log", replay_log, "Session log")->required()->check(CLI::ExistingFile);
  replay->add_option("--config", replay_config, "Replay under this config instead of the recorded one")
      ->check(CLI::ExistingFile);
  replay->add_option("--metrics-out", replay_metrics, "Write metrics JSON here");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run a scripted operator offline");
  simulate->add_option("--script", sim_args.script, "Operator script")->required()->check(CLI::ExistingFile);
  simulate->add_option("--config", sim_args.config, "Base session config")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim_args.seed, "Override the seed");
  simulate->add_option("--pa", sim_args.pa, "Force partial autonomy on or off")->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--metrics-out", sim_args.metrics_out, "Write metrics JSON here");
  simulate->add_option("--log-out", sim_args.log_out, "Record the session log here");
  simulate->add_flag("--record-frames", sim_args.record_frames, "Store frames next to the log");
  simulate->add_option("--wire-out", sim_args.wire_out, "Dump the wire messages as JSON lines");

  std::string demo_config;
  std::optional<std::uint64_t> demo_seed;
  int demo_trials = 100;
  auto* demo = app.add_subcommand("calibrate-demo", "Calibrate both simulated sensors and test on fresh noise");
  demo->add_option("--config", demo_config, "Session config")->check(CLI::ExistingFile);
  demo->add_option("--seed", demo_seed, "Override the seed");
  demo->add_option("--trials", demo_trials, "Fresh no-contact frames per sensor")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      server_options.max_ticks = max_ticks;
      if (!log_out.empty()) server_options.log_path = log_out;
      return run_serve(config_path, port, seed, server_options);
    }
    if (*replay) return run_replay(replay_log, replay_config, replay_metrics);
    if (*simulate) return run_simulate(sim_args);
    if (*demo) return run_calibrate_demo(demo_config, demo_seed, demo_trials);
  } catch (const t2h::ReplayError& e) {
    std::cerr << "t2h: replay error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "t2h: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
