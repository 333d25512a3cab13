#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "sbarom/sbarom.hpp"

namespace sbarom::cli {

namespace {

namespace fs = std::filesystem;

struct ReconstructArgs {
  std::string frames;
  std::size_t links = 5;
  std::size_t reference_index = 0;
  std::string out;
};

struct SelectOrderArgs {
  std::string frames;
  std::size_t n_min = 2;
  std::size_t n_max = 5;
  double threshold = kDefaultOrderThreshold;
  std::string out;
};

struct SimulateArgs {
  std::string config;
  std::string pressure;
  double t_end = 0.0;
  double dt_out = 1e-3;
  std::string out;
};

struct IdentifyArgs {
  std::string config;
  std::string frames;
  std::string pressure;
  std::size_t budget = 200;
  bool per_joint_damping = false;
  std::string out;
};

struct CompareArgs {
  std::string traj;
  std::string frames;
  std::size_t links = 5;
  std::string out;
};

// Chain described by a config: fitted to its reference frame when one is
// given (paths relative to the config file), uniform otherwise.
LinkChain chain_from_config(const ModelConfig& cfg, const fs::path& config_path) {
  if (!cfg.reference_frames) return build_chain(cfg.geometry, cfg.n_links);
  fs::path ref = *cfg.reference_frames;
  if (ref.is_relative()) ref = config_path.parent_path() / ref;
  const auto frames = parse_frames(ref);
  if (cfg.reference_index >= frames.size()) {
    throw ConfigError("reference_index", "exceeds the number of reference frames");
  }
  return build_chain(cfg.geometry, cfg.n_links, &frames[cfg.reference_index]);
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  const auto frames = parse_frames(fs::path(a.frames));
  if (a.reference_index >= frames.size()) {
    throw InvalidInput("--reference-index " + std::to_string(a.reference_index) + " but only " +
                       std::to_string(frames.size()) + " frames");
  }
  const LinkChain reference = fit_reference_chain(frames[a.reference_index], a.links);

  ReconstructionReport report;
  report.n_links = a.links;
  report.reference_index = a.reference_index;
  report.reference_chain.assign(reference.links().begin(), reference.links().end());
  double sum = 0.0;
  for (const auto& frame : frames) {
    const auto seg = segment_frame(frame, a.links);
    const auto curve = spline_through(seg.nodes);
    FrameReconstruction fr;
    fr.time = frame.time;
    fr.node_indices = seg.indices;
    fr.nodes = seg.nodes;
    fr.knots = curve.knots();
    fr.joint_angles = frame_to_joint_angles(frame, reference);
    fr.deviation = max_deviation(curve, frame);
    report.max_error = std::max(report.max_error, fr.deviation.max);
    sum += fr.deviation.max;
    report.frames.push_back(std::move(fr));
  }
  report.mean_error = sum / static_cast<double>(frames.size());
  write_report(fs::path(a.out), report);

  out << "frames: " << frames.size() << ", links: " << a.links << '\n'
      << "max deviation: " << format_number(report.max_error) << " m\n"
      << "mean of per-frame max deviation: " << format_number(report.mean_error) << " m\n";
  return kExitOk;
}

int cmd_select_order(const SelectOrderArgs& a, std::ostream& out) {
  if (a.n_min > a.n_max) {
    throw InvalidInput("--min " + std::to_string(a.n_min) + " exceeds --max " + std::to_string(a.n_max));
  }
  const auto frames = parse_frames(fs::path(a.frames));
  const auto report = select_order(frames, a.n_min, a.n_max, a.threshold);
  write_report(fs::path(a.out), report);
  for (const auto& c : report.candidates) {
    out << "n=" << c.n << " max=" << format_number(c.max_error)
        << " m mean=" << format_number(c.mean_error) << " m\n";
  }
  if (!report.threshold_met) out << "threshold not met; reporting the lowest-error order\n";
  out << "chosen n: " << report.chosen_n << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const fs::path config_path(a.config);
  const ModelConfig cfg = parse_config(config_path);
  const PressureTrace trace = parse_pressure(fs::path(a.pressure));
  if (!(a.dt_out > 0.0)) throw InvalidInput("--dt-out must be > 0");
  const LinkChain chain = chain_from_config(cfg, config_path);

  SimConfig sim;
  sim.t_end = a.t_end;
  sim.output_rate = 1.0 / a.dt_out;
  const Trajectory traj = simulate(chain, cfg.params, cfg.geometry, trace, sim);
  write_trajectory(fs::path(a.out), traj);

  const auto& final_q = traj.states.back().q;
  out << "samples: " << traj.size() << '\n' << "final q [rad]:";
  for (Eigen::Index i = 0; i < final_q.size(); ++i) out << ' ' << format_number(final_q[i]);
  out << '\n';

  // Oscillation of the tip joint during the first second after the first
  // pressure change.
  double onset = sim.t_start;
  for (const auto& s : trace.samples()) {
    if (s.pressure != 0.0) {
      onset = std::max(s.time, sim.t_start);
      break;
    }
  }
  try {
    const double f = dominant_frequency(traj, chain.size() - 1, {onset, std::min(onset + 1.0, sim.t_end)});
    out << "dominant frequency: " << format_number(f) << " Hz\n";
  } catch (const InsufficientData&) {
    out << "dominant frequency: not measurable\n";
  }
  return kExitOk;
}

int cmd_identify(const IdentifyArgs& a, std::ostream& out) {
  if (a.budget < 1) throw InvalidInput("--budget must be >= 1");
  const fs::path config_path(a.config);
  const ModelConfig cfg = parse_config(config_path);
  const auto frames = parse_frames(fs::path(a.frames));
  const PressureTrace trace = parse_pressure(fs::path(a.pressure));
  const double f0 = frames.front().time;
  const double f1 = frames.back().time;
  const double p0 = trace.samples().front().time;
  const double p1 = trace.samples().back().time;
  if (f1 < p0 || f0 > p1) {
    throw InvalidInput("frame time range does not overlap the pressure time range");
  }
  const LinkChain chain = chain_from_config(cfg, config_path);

  IdentifyOptions options;
  options.budget = a.budget;
  options.per_joint_damping = a.per_joint_damping;
  const auto result = identify(chain, cfg.geometry, frames, trace, cfg.params,
                               ParamBounds::around(cfg.params), options);

  ModelConfig fitted = cfg;
  fitted.params = result.params;
  write_report(fs::path(a.out), result, fitted);

  out << "evaluations: " << result.evaluations << (result.converged ? " (converged)" : "") << '\n'
      << "k_b: " << format_number(result.params.k_b) << " N m/rad\n"
      << "damping:";
  for (double d : result.params.damping) out << ' ' << format_number(d);
  out << " N m s/rad\n"
      << "objective (RMS): " << format_number(result.value.rms) << " m"
      << (result.value.diverged ? " [diverged]" : "") << '\n';
  return kExitOk;
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const Trajectory traj = parse_trajectory(fs::path(a.traj));
  const auto frames = parse_frames(fs::path(a.frames));
  if (traj.links() != a.links) {
    throw InvalidInput("trajectory has " + std::to_string(traj.links()) + " links, --links is " +
                       std::to_string(a.links));
  }
  const std::size_t n = a.links;

  std::ofstream csv(a.out);
  if (!csv) throw IoError("cannot open '" + a.out + "' for writing");
  csv << "time_s";
  for (std::size_t i = 1; i <= n; ++i) {
    csv << ",x_meas_" << i << ",y_meas_" << i << ",x_sim_" << i << ",y_sim_" << i << ",err_" << i;
  }
  csv << '\n';

  double sum2 = 0.0;
  double max_err = 0.0;
  std::size_t compared = 0;
  std::vector<double> joint_sum2(n, 0.0);
  for (const auto& frame : frames) {
    if (frame.time < traj.times.front() || frame.time > traj.times.back()) continue;
    const auto measured = segment_frame(frame, n).nodes;
    const auto simulated = traj.positions_at(frame.time);
    csv << format_number(frame.time);
    for (std::size_t i = 1; i <= n; ++i) {
      const double e = (measured[i] - simulated[i]).norm();
      csv << ',' << format_number(measured[i].x()) << ',' << format_number(measured[i].y()) << ','
          << format_number(simulated[i].x()) << ',' << format_number(simulated[i].y()) << ','
          << format_number(e);
      sum2 += e * e;
      joint_sum2[i - 1] += e * e;
      max_err = std::max(max_err, e);
    }
    csv << '\n';
    ++compared;
  }
  csv.flush();
  if (!csv) throw IoError("failed writing '" + a.out + "'");
  if (compared == 0) throw InvalidInput("no frame lies inside the trajectory time span");

  const double rms = std::sqrt(sum2 / static_cast<double>(compared * n));
  nlohmann::json summary;
  summary["frames_compared"] = compared;
  summary["frames_skipped"] = frames.size() - compared;
  summary["rms_error_m"] = rms;
  summary["max_error_m"] = max_err;
  std::vector<double> per_joint;
  for (double s : joint_sum2) per_joint.push_back(std::sqrt(s / static_cast<double>(compared)));
  summary["joint_rms_error_m"] = per_joint;
  const std::string summary_path = a.out + ".summary.json";
  std::ofstream js(summary_path);
  if (!js) throw IoError("cannot open '" + summary_path + "' for writing");
  js << summary.dump(2) << '\n';

  out << "frames compared: " << compared << '\n'
      << "rms error: " << format_number(rms) << " m\n"
      << "max error: " << format_number(max_err) << " m\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced-order modelling toolkit for soft bending actuators", "sbarom"};
  app.require_subcommand(1);

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Segment frames and reconstruct shapes with splines");
  reconstruct->add_option("--frames", rec.frames, "Frames CSV")->required();
  reconstruct->add_option("--links", rec.links, "Number of links")->required()->check(CLI::PositiveNumber);
  reconstruct->add_option("--reference-index", rec.reference_index, "Frame holding the rest shape");
  reconstruct->add_option("--out", rec.out, "Report path (JSON)")->required();

  SelectOrderArgs sel;
  auto* select = app.add_subcommand("select-order", "Choose the smallest adequate link count");
  select->add_option("--frames", sel.frames, "Frames CSV")->required();
  select->add_option("--min", sel.n_min, "Smallest link count")->required();
  select->add_option("--max", sel.n_max, "Largest link count")->required();
  select->add_option("--threshold-m", sel.threshold, "Maximum-error threshold [m]");
  select->add_option("--out", sel.out, "Report path (JSON)")->required();

  SimulateArgs simu;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the response to a pressure trace");
  simulate_cmd->add_option("--config", simu.config, "Model config (JSON)")->required();
  simulate_cmd->add_option("--pressure", simu.pressure, "Pressure CSV")->required();
  simulate_cmd->add_option("--t-end", simu.t_end, "End time [s]")->required();
  simulate_cmd->add_option("--dt-out", simu.dt_out, "Output interval [s]");
  simulate_cmd->add_option("--out", simu.out, "Trajectory CSV")->required();

  IdentifyArgs ident;
  auto* identify_cmd = app.add_subcommand("identify", "Fit joint stiffness and damping to frames");
  identify_cmd->add_option("--config", ident.config, "Initial model config (JSON)")->required();
  identify_cmd->add_option("--frames", ident.frames, "Frames CSV")->required();
  identify_cmd->add_option("--pressure", ident.pressure, "Pressure CSV")->required();
  identify_cmd->add_option("--budget", ident.budget, "Objective evaluations");
  identify_cmd->add_flag("--per-joint-damping", ident.per_joint_damping, "Fit one damping value per joint");
  identify_cmd->add_option("--out", ident.out, "Report path (JSON)")->required();

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare a trajectory against measured frames");
  compare->add_option("--traj", cmp.traj, "Trajectory CSV")->required();
  compare->add_option("--frames", cmp.frames, "Frames CSV")->required();
  compare->add_option("--links", cmp.links, "Number of links")->required()->check(CLI::PositiveNumber);
  compare->add_option("--out", cmp.out, "Comparison CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*reconstruct) return cmd_reconstruct(rec, out);
    if (*select) return cmd_select_order(sel, out);
    if (*simulate_cmd) return cmd_simulate(simu, out);
    if (*identify_cmd) return cmd_identify(ident, out);
    if (*compare) return cmd_compare(cmp, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    // Parse, config, validation, divergence and insufficient-data errors.
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace sbarom::cli
