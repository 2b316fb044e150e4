#include "rmc/csv_log.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rmc/cascade.hpp"
#include "rmc/config.hpp"

namespace rmc {
namespace {

void append_series(std::vector<std::string>& h, const std::string& prefix, std::size_t count) {
  for (std::size_t i = 1; i <= count; ++i) {
    h.push_back(prefix + "_" + std::to_string(i));
  }
}

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, res.ptr - buf);
}

void put(std::ostream& out, const Vec& v, double scale) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << ',';
    put(out, scale * v(i));
  }
}

}  // namespace

std::vector<std::string> log_header(std::size_t m, std::size_t n, bool with_analysis) {
  std::vector<std::string> h{"t"};
  append_series(h, "x", m * n);
  append_series(h, "xr", m);
  append_series(h, "e1", m);
  append_series(h, "en", m);
  append_series(h, "r", m);
  append_series(h, "tau", m);
  append_series(h, "Pi", m);
  if (with_analysis) {
    h.insert(h.end(), {"V1", "L", "P", "V"});
  }
  return h;
}

void write_log_csv(std::ostream& out, const TrajectoryLog& log, const AnalysisColumns& analysis,
                   const CsvOptions& opts) {
  const bool with_analysis = !analysis.empty();
  if (with_analysis && (analysis.V1.size() != log.size() || analysis.L.size() != log.size() ||
                        analysis.P.size() != log.size() || analysis.V.size() != log.size())) {
    throw ValidationError("analysis columns must match the number of log samples");
  }
  const auto header = log_header(log.m, log.n, with_analysis);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << '\n';
  const double s = opts.degrees ? 180.0 / std::numbers::pi : 1.0;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const LogSample& row = log.samples[k];
    put(out, row.t);
    put(out, row.X, s);
    put(out, row.xr.front(), s);
    put(out, row.e.front(), s);
    put(out, row.e.back(), s);
    put(out, row.r, s);
    put(out, row.tau, 1.0);
    put(out, row.pi, 1.0);
    if (with_analysis) {
      for (const double v : {analysis.V1[k], analysis.L[k], analysis.P[k], analysis.V[k]}) {
        out << ',';
        put(out, v);
      }
    }
    out << '\n';
  }
}

void write_log_csv(const std::filesystem::path& path, const TrajectoryLog& log, const AnalysisColumns& analysis,
                   const CsvOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write '" + path.string() + "'");
  }
  write_log_csv(out, log, analysis, opts);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw ValidationError("CSV column '" + name + "' not found");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.push_back(row[c]);
  }
  return out;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (table.header.empty()) {
      while (std::getline(ss, cell, ',')) {
        table.header.push_back(cell);
      }
      continue;
    }
    std::vector<double> row;
    row.reserve(table.header.size());
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError("CSV: '" + cell + "' is not a number", lineno);
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw ConfigError("CSV: expected " + std::to_string(table.header.size()) + " fields", lineno);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) {
    throw ValidationError("CSV: missing header");
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  return read_csv(in);
}

TrajectoryLog log_from_csv(const CsvTable& table, const PlantModel& plant, const ReferenceTrajectory& ref) {
  const std::size_t m = plant.m;
  const std::size_t n = plant.n;
  const auto expected = log_header(m, n, false);
  for (const auto& name : expected) {
    table.column(name);
  }
  if (table.rows.size() < 2) {
    throw ValidationError("CSV: need at least two samples");
  }
  const CascadeCoefficients coeffs(n);
  const auto col = [&table](const std::string& prefix, std::size_t count) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i <= count; ++i) {
      idx.push_back(table.column(prefix + "_" + std::to_string(i)));
    }
    return idx;
  };
  const auto cx = col("x", m * n);
  const auto cr = col("r", m);
  const auto ctau = col("tau", m);
  const auto cpi = col("Pi", m);
  const std::size_t ct = table.column("t");
  const auto gather = [](const std::vector<double>& row, const std::vector<std::size_t>& idx) {
    Vec v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = row[idx[i]];
    }
    return v;
  };

  TrajectoryLog log;
  log.m = m;
  log.n = n;
  log.dt = table.rows[1][ct] - table.rows[0][ct];
  for (const auto& row : table.rows) {
    LogSample s;
    s.t = row[ct];
    s.X = gather(row, cx);
    s.xr = ref.derivatives(s.t, n + 1);
    s.e = compute_errors(unstack(s.X, m, n), VecList(s.xr.begin(), s.xr.begin() + static_cast<std::ptrdiff_t>(n)),
                         coeffs);
    s.r = gather(row, cr);
    s.tau = gather(row, ctau);
    s.pi = gather(row, cpi);
    s.xn = plant.highest_derivative(s.X, s.tau);
    log.samples.push_back(std::move(s));
  }
  for (std::size_t k = 1; k < log.size(); ++k) {
    const double step = log.samples[k].t - log.samples[k - 1].t;
    if (!(std::abs(step - log.dt) <= 1e-9 * std::max(1.0, std::abs(log.samples[k].t)))) {
      throw ValidationError("CSV: time stamps are not uniformly spaced");
    }
  }
  return log;
}

std::string plot_script(const std::string& csv_name, std::size_t m, bool degrees) {
  const std::string unit = degrees ? "deg" : "rad";
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
     << "# Tracking errors and control inputs from " << csv_name << "\n"
     << "import csv\nimport sys\n\nimport matplotlib.pyplot as plt\n\n"
     << "path = sys.argv[1] if len(sys.argv) > 1 else \"" << csv_name << "\"\n"
     << "with open(path, newline=\"\") as fh:\n"
     << "    rows = list(csv.DictReader(fh))\n"
     << "t = [float(r[\"t\"]) for r in rows]\n"
     << "m = " << m << "\n"
     << "fig, axes = plt.subplots(m, 2, figsize=(10, 3 * m), squeeze=False)\n"
     << "for i in range(1, m + 1):\n"
     << "    axes[i - 1][0].plot(t, [float(r[f\"e1_{i}\"]) for r in rows])\n"
     << "    axes[i - 1][0].set_ylabel(f\"e1_{i} [" << unit << "]\")\n"
     << "    axes[i - 1][1].plot(t, [float(r[f\"tau_{i}\"]) for r in rows])\n"
     << "    axes[i - 1][1].set_ylabel(f\"tau_{i}\")\n"
     << "for ax in axes[-1]:\n"
     << "    ax.set_xlabel(\"t [s]\")\n"
     << "axes[0][0].set_title(\"Link tracking errors\")\n"
     << "axes[0][1].set_title(\"Control inputs\")\n"
     << "fig.tight_layout()\n"
     << "fig.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=120)\n";
  return os.str();
}

}  // namespace rmc
