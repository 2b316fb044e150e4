#include "rmc/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rmc/config.hpp"
#include "rmc/csv_log.hpp"
#include "rmc/diagnostics.hpp"
#include "rmc/sdu.hpp"

namespace rmc {
namespace fs = std::filesystem;

namespace {

DiagnosticsOptions diagnostics_options(const ScenarioConfig& cfg) {
  DiagnosticsOptions d;
  d.safety = cfg.safety;
  d.gamma1 = cfg.gamma1;
  d.gamma2 = cfg.gamma2;
  return d;
}

void print_checks(std::ostream& out, const DiagnosticsReport& rep) {
  for (const auto& c : rep.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
}

struct RunResult {
  fs::path csv;
  std::string summary;
};

RunResult run_one(const fs::path& config, const fs::path& csv_path, bool degrees, bool plot) {
  const ScenarioConfig cfg = load_config(config);
  const Scenario sc = make_scenario(cfg);
  const auto start = std::chrono::steady_clock::now();
  const TrajectoryLog log = run_scenario(sc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream summary;
  AnalysisColumns cols;
  if (cfg.analysis_enabled && log.size() >= 2) {
    const DiagnosticsReport rep = run_diagnostics(log, sc, diagnostics_options(cfg));
    cols = rep.columns();
    print_checks(summary, rep);
  }
  write_log_csv(csv_path, log, cols, CsvOptions{degrees});
  if (plot) {
    fs::path script = csv_path;
    script.replace_extension(".plot.py");
    std::ofstream(script) << plot_script(csv_path.filename().string(), sc.plant.m, degrees);
  }

  double max_tau = 0.0;
  for (const auto& s : log.samples) {
    max_tau = std::max(max_tau, s.tau.lpNorm<Eigen::Infinity>());
  }
  const double scale = degrees ? 180.0 / std::numbers::pi : 1.0;
  std::ostringstream head;
  head << config.filename().string() << " -> " << csv_path.string() << '\n'
       << "  samples " << log.size() << ", final |e1| " << format_double(scale * log.samples.back().e.front().norm())
       << (degrees ? " deg" : "") << ", max |tau| " << format_double(max_tau) << ", wall " << wall << " s\n";
  return {csv_path, head.str() + summary.str()};
}

Mat read_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) {
          throw std::invalid_argument(tok);
        }
      } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(lineno) + ": '" + tok + "' is not a number");
      }
    }
    if (!row.empty()) {
      rows.push_back(std::move(row));
    }
  }
  const std::size_t m = rows.size();
  if (m == 0) {
    throw ValidationError("matrix file is empty");
  }
  Mat g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != m) {
      throw ValidationError("matrix must be square: row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " entries");
    }
    for (std::size_t j = 0; j < m; ++j) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return g;
}

void print_matrix(std::ostream& out, const std::string& name, const Mat& A) {
  out << name << ":\n";
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    out << ' ';
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out << ' ' << format_double(A(i, j));
    }
    out << '\n';
  }
}

}  // namespace

fs::path log_dir_override() {
  const char* dir = std::getenv("RMC_LOG_DIR");
  return dir && *dir ? fs::path(dir) : fs::path();
}

fs::path resolve_output(const fs::path& requested) {
  const fs::path dir = log_dir_override();
  if (dir.empty()) {
    return requested;
  }
  fs::create_directories(dir);
  return dir / requested.filename();
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        if (!opts.batch_dir) {
          fs::path csv = opts.output.value_or(fs::path(opts.config.stem().string() + ".csv"));
          out << run_one(opts.config, resolve_output(csv), opts.degrees, opts.plot_script).summary;
          return static_cast<int>(kExitOk);
        }
        std::vector<fs::path> configs;
        for (const auto& entry : fs::directory_iterator(*opts.batch_dir)) {
          if (entry.is_regular_file() && entry.path().extension() == ".cfg") {
            configs.push_back(entry.path());
          }
        }
        std::sort(configs.begin(), configs.end());
        const fs::path dir = log_dir_override().empty() ? opts.output.value_or(*opts.batch_dir) : log_dir_override();
        fs::create_directories(dir);
        // Scenarios share nothing mutable; each writes its own files.
        std::vector<std::future<RunResult>> jobs;
        for (const auto& cfg : configs) {
          jobs.push_back(std::async(std::launch::async, run_one, cfg, dir / (cfg.stem().string() + ".csv"),
                                    opts.degrees, opts.plot_script));
        }
        int code = kExitOk;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          const int rc = guarded(
              [&] {
                out << jobs[i].get().summary;
                return static_cast<int>(kExitOk);
              },
              err);
          if (rc != kExitOk) {
            err << "  in " << configs[i].string() << '\n';
            code = std::max(code, rc);
          }
        }
        return code;
      },
      err);
}

int cmd_check_gains(const fs::path& config, const std::optional<fs::path>& bounds_file, std::ostream& out,
                    std::ostream& err) {
  return guarded(
      [&] {
        const ScenarioConfig cfg = load_config(config);
        const Scenario sc = make_scenario(cfg);
        BoundEstimates bounds;
        if (bounds_file) {
          bounds = load_bounds(*bounds_file, sc.plant.m);
        } else {
          bounds = estimate_bounds(sc.ref, sc.plant, sc.gains, sc.t0, sc.T, sc.dt, cfg.safety, sc.dt);
          bounds.gamma1 = cfg.gamma1.value_or(0.0);
          bounds.gamma2 = cfg.gamma2.value_or(0.0);
          out << "bounds estimated from the reference over [0, " << format_double(sc.T) << "] s\n";
        }
        const GainCheck a = check_alpha(sc.gains.alpha);
        const CCheck c = validate_C(sc.gains.C, bounds, sc.gains.alpha);
        const Vec en0 = initial_state(sc.plant, sc.ref, sc.X0, sc.t0).ctrl.en0();
        out << (a.pass ? "PASS" : "FAIL") << " alpha: lambda_min >= 1/2, margin " << format_double(a.margin) << '\n'
            << (c.pass ? "PASS" : "FAIL") << " C: required " << format_vector(c.minimum) << ", margin "
            << format_vector(c.margin) << '\n'
            << "K = diag(" << format_vector(sc.gains.K()) << ")\n"
            << "zeta_nbar = " << format_vector(bounds.zeta_nbar) << ", gamma1 = " << format_double(bounds.gamma1)
            << ", gamma2 = " << format_double(bounds.gamma2) << '\n'
            << "zeta_L = " << format_double(zeta_L(bounds, sc.gains.C, en0)) << '\n';
        return static_cast<int>(a.pass && c.pass ? kExitOk : kExitValidation);
      },
      err);
}

int cmd_decompose(const fs::path& matrix_file, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const Mat g = read_matrix(matrix_file);
        const SduFactors f = sdu_decompose(g);
        print_matrix(out, "S", f.S);
        print_matrix(out, "D", Mat(f.D.asDiagonal()));
        print_matrix(out, "U", f.U);
        return static_cast<int>(kExitOk);
      },
      err);
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const ScenarioConfig cfg = load_config(opts.config);
        const Scenario sc = make_scenario(cfg);
        CsvTable table = read_csv(opts.log_csv);
        if (opts.degrees) {
          const double s = std::numbers::pi / 180.0;
          for (std::size_t c = 0; c < table.header.size(); ++c) {
            const std::string& h = table.header[c];
            if (h.starts_with("x") || h.starts_with("e1_") || h.starts_with("en_") || h.starts_with("r_")) {
              for (auto& row : table.rows) {
                row[c] *= s;
              }
            }
          }
        }
        const TrajectoryLog log = log_from_csv(table, sc.plant, sc.ref);
        const DiagnosticsReport rep = run_diagnostics(log, sc, diagnostics_options(cfg));

        fs::path diag = opts.output.value_or(fs::path(opts.log_csv.stem().string() + ".diag.csv"));
        diag = resolve_output(diag);
        std::ofstream f(diag, std::ios::binary);
        if (!f) {
          throw ValidationError("cannot write '" + diag.string() + "'");
        }
        f << "t,V1,L,P,V,lemma1_margin\n";
        for (std::size_t k = 0; k < log.size(); ++k) {
          f << format_double(log.samples[k].t) << ',' << format_double(rep.V1[k]) << ','
            << format_double(rep.lp.L[k]) << ',' << format_double(rep.lp.P[k]) << ',' << format_double(rep.V[k])
            << ',' << format_double(rep.lemma1_margin[k]) << '\n';
        }
        out << "diagnostics -> " << diag.string() << '\n';
        print_checks(out, rep);
        return static_cast<int>(rep.all_pass() ? kExitOk : kExitValidation);
      },
      err);
}

}  // namespace rmc
