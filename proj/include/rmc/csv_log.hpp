#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmc/simulator.hpp"

namespace rmc {

/// Optional per-sample diagnostic columns appended after the state columns.
struct AnalysisColumns {
  std::vector<double> V1;
  std::vector<double> L;
  std::vector<double> P;
  std::vector<double> V;

  bool empty() const noexcept { return V1.empty(); }
};

/// t, x_1..x_{mn}, xr_1..xr_m, e1_1..e1_m, en_1..en_m, r_1..r_m, tau_1..tau_m, Pi_1..Pi_m
/// [, V1, L, P, V]
std::vector<std::string> log_header(std::size_t m, std::size_t n, bool with_analysis);

struct CsvOptions {
  bool degrees = false;  // convert x, xr, e1, en, r columns to degrees
};

void write_log_csv(std::ostream& out, const TrajectoryLog& log, const AnalysisColumns& analysis = {},
                   const CsvOptions& opts = {});
void write_log_csv(const std::filesystem::path& path, const TrajectoryLog& log,
                   const AnalysisColumns& analysis = {}, const CsvOptions& opts = {});

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ValidationError when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Rebuilds a log from a radian CSV: X, tau and Pi are read back; e_i and the
/// reference are recomputed; x^(n) comes from the plant with the logged tau
/// and r from the file. int e_n is not stored and stays empty.
TrajectoryLog log_from_csv(const CsvTable& table, const PlantModel& plant, const ReferenceTrajectory& ref);

/// Plotting script (matplotlib) for tracking errors and control inputs.
std::string plot_script(const std::string& csv_name, std::size_t m, bool degrees);

}  // namespace rmc
