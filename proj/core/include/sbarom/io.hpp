#pragma once

// File formats. Every quantity is in SI units (m, s, Pa, kg).
//
//   frames CSV     time_s,point_index,x_m,y_m[,z_m]   (long format)
//   pressure CSV   time_s,pressure_pa
//   trajectory CSV time_s,q_1..q_n,qdot_1..qdot_n,x_0,y_0,..,x_n,y_n
//   model config   JSON with geometry{..}, n_links, params{k_b, damping[]}

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbarom/dynamics.hpp"
#include "sbarom/identification.hpp"
#include "sbarom/integrator.hpp"
#include "sbarom/reconstruction.hpp"

namespace sbarom {

inline constexpr double kMaxOutOfPlane = 0.005;  // m, |z| allowed in frame files
inline constexpr int kCsvSignificantDigits = 10;

struct ModelConfig {
  ActuatorGeometry geometry;
  std::size_t n_links = 5;
  DynamicsParams params = DynamicsParams::uniform(1.6067, 0.008, 5);
  std::optional<std::string> reference_frames;  // path to a frames CSV
  std::size_t reference_index = 0;              // frame used as the rest shape

  /// Throws ConfigError naming the first offending key.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

std::vector<SensorFrame> parse_frames(std::istream& in);
std::vector<SensorFrame> parse_frames(const std::filesystem::path& path);
void write_frames(std::ostream& out, const std::vector<SensorFrame>& frames);
void write_frames(const std::filesystem::path& path, const std::vector<SensorFrame>& frames);

PressureTrace parse_pressure(std::istream& in);
PressureTrace parse_pressure(const std::filesystem::path& path);
void write_pressure(std::ostream& out, const PressureTrace& trace);
void write_pressure(const std::filesystem::path& path, const PressureTrace& trace);

ModelConfig parse_config(std::istream& in);
ModelConfig parse_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ModelConfig& config);
void write_config(const std::filesystem::path& path, const ModelConfig& config);

void write_trajectory(std::ostream& out, const Trajectory& trajectory);
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory parse_trajectory(std::istream& in);
Trajectory parse_trajectory(const std::filesystem::path& path);

/// Per-frame reconstruction result written by `sbarom reconstruct`.
struct FrameReconstruction {
  double time = 0.0;
  std::vector<std::size_t> node_indices;
  std::vector<Vec2> nodes;
  std::vector<double> knots;
  VecX joint_angles;
  Deviation deviation;
};

struct ReconstructionReport {
  std::size_t n_links = 0;
  std::size_t reference_index = 0;
  std::vector<LinkParams> reference_chain;
  std::vector<FrameReconstruction> frames;
  double max_error = 0.0;
  double mean_error = 0.0;
};

void write_report(std::ostream& out, const ReconstructionReport& report);
void write_report(std::ostream& out, const OrderSelectionReport& report);
void write_report(std::ostream& out, const IdentifyResult& result, const ModelConfig& fitted);
template <class Report>
void write_report(const std::filesystem::path& path, const Report& report);
void write_report(const std::filesystem::path& path, const IdentifyResult& result,
                  const ModelConfig& fitted);

ReconstructionReport parse_reconstruction_report(std::istream& in);
OrderSelectionReport parse_order_report(std::istream& in);

/// Formats a double with kCsvSignificantDigits significant digits.
std::string format_number(double value);

}  // namespace sbarom
