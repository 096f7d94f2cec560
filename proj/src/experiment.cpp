#include "srs/experiment.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <new>
#include <sstream>

#include "srs/metrics.hpp"

namespace srs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ParameterError("bad number for '" + key + "': '" + value + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ParameterError("bad integer for '" + key + "': '" + value + "'");
  return v;
}

int parse_int32(const std::string& key, const std::string& value) {
  const long long v = parse_int(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ParameterError("integer out of range for '" + key + "'");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ParameterError("empty list for '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParameterError("bad boolean for '" + key + "': '" + value + "'");
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

int worker_count(const ExperimentConfig& cfg) {
  int workers = cfg.threads;
  if (workers <= 0) {
    if (const char* env = std::getenv("SRS_THREADS"); env && *env) {
      try {
        workers = std::stoi(env);
      } catch (const std::exception&) {
        throw ParameterError(std::string("SRS_THREADS is not an integer: ") + env);
      }
    }
  }
  if (workers <= 0) workers = omp_get_max_threads();
  return std::max(1, std::min(workers, cfg.trials));
}

void aggregate(RunReport& report) {
  std::vector<const TrialResult*> ok;
  for (const auto& t : report.trials)
    if (t.ok()) ok.push_back(&t);
  const double count = static_cast<double>(ok.size());
  if (ok.empty()) {
    report.mean_rec_err = report.mean_seg_err = report.mean_seconds = NAN;
    report.mean_outer_iters = NAN;
    return;
  }
  auto mean_of = [&](auto field) {
    double s = 0.0;
    for (const auto* t : ok) s += field(*t);
    return s / count;
  };
  auto std_of = [&](auto field, double mean) {
    if (ok.size() < 2) return 0.0;
    double s = 0.0;
    for (const auto* t : ok) s += (field(*t) - mean) * (field(*t) - mean);
    return std::sqrt(s / (count - 1.0));
  };
  auto rec = [](const TrialResult& t) { return t.rec_err; };
  auto seg = [](const TrialResult& t) { return t.seg_err; };
  auto sec = [](const TrialResult& t) { return t.seconds; };
  auto its = [](const TrialResult& t) { return static_cast<double>(t.outer_iters); };
  report.mean_rec_err = mean_of(rec);
  report.mean_seg_err = mean_of(seg);
  report.mean_seconds = mean_of(sec);
  report.mean_outer_iters = mean_of(its);
  report.std_rec_err = std_of(rec, report.mean_rec_err);
  report.std_seg_err = std_of(seg, report.mean_seg_err);
  report.std_seconds = std_of(sec, report.mean_seconds);
}

}  // namespace

AngleSpec AngleSpec::parse(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) ||
      ss.rdbuf()->in_avail() > 0)
    throw ParameterError("angles must be start:step:stop, got '" + text + "'");
  AngleSpec spec{parse_double("angles", trim(a)), parse_double("angles", trim(b)),
                 parse_double("angles", trim(c))};
  spec.angles();  // validates
  return spec;
}

std::string AngleSpec::to_string() const {
  return fmt(start) + ":" + fmt(step) + ":" + fmt(stop);
}

ExperimentConfig ExperimentConfig::preset(PhantomKind kind) {
  ExperimentConfig cfg;
  cfg.phantom = kind;
  if (kind == PhantomKind::Piecewise) {
    cfg.noise = 0.05;
    cfg.solver.lambda_n = 0.2;
    cfg.solver.lambda_c = 1.0;
    cfg.solver.gamma1 = 1.0;
    cfg.solver.gamma2 = 2.0;
    cfg.solver.lambda_t = 1.0;
  } else {
    cfg.noise = 0.01;
    cfg.solver.lambda_n = 123.0;
    cfg.solver.lambda_c = 0.55;
    cfg.solver.gamma1 = 0.6;
    cfg.solver.gamma2 = 0.6;
    cfg.solver.lambda_t = 35.0;
  }
  return cfg;
}

int resolved_detectors(const ExperimentConfig& cfg) {
  return cfg.detectors > 0 ? cfg.detectors : sweep_detectors(cfg.n);
}

void ExperimentConfig::validate() const {
  if (n < 16) throw ParameterError("n must be >= 16");
  if (detectors < 0) throw ParameterError("detectors must be positive (or 0 for auto)");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (!(noise >= 0.0)) throw ParameterError("noise must be nonnegative");
  if (angles.angles().empty()) throw ParameterError("angle spec yields no angles");
  if (means.size() != std_devs.size())
    throw ParameterError("means and std_devs must have the same length");
  solver.validate();
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in,
                   const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  auto& s = cfg.solver;
  if (key == "phantom") {
    if (value == "piecewise")
      cfg.phantom = PhantomKind::Piecewise;
    else if (value == "smooth")
      cfg.phantom = PhantomKind::Smooth;
    else
      throw ParameterError("phantom must be piecewise or smooth");
  } else if (key == "n") {
    cfg.n = parse_int32(key, value);
  } else if (key == "detectors") {
    cfg.detectors = value == "auto" ? 0 : parse_int32(key, value);
  } else if (key == "angles") {
    cfg.angles = AngleSpec::parse(value);
  } else if (key == "noise") {
    cfg.noise = parse_double(key, value);
  } else if (key == "trials") {
    cfg.trials = parse_int32(key, value);
  } else if (key == "seed") {
    const long long v = parse_int(key, value);
    if (v < 0) throw ParameterError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "variant") {
    cfg.variant = parse_variant(value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "lambda_n") {
    s.lambda_n = parse_double(key, value);
  } else if (key == "lambda_c") {
    s.lambda_c = parse_double(key, value);
  } else if (key == "lambda_t") {
    s.lambda_t = parse_double(key, value);
  } else if (key == "gamma1") {
    s.gamma1 = parse_double(key, value);
  } else if (key == "gamma2") {
    s.gamma2 = parse_double(key, value);
  } else if (key == "eps_clamp") {
    s.eps_clamp = parse_double(key, value);
  } else if (key == "outer_tol") {
    s.outer_tol = parse_double(key, value);
  } else if (key == "cgls_tol") {
    s.cgls_tol = parse_double(key, value);
  } else if (key == "admm_tol") {
    s.admm_tol = parse_double(key, value);
  } else if (key == "bregman_tol") {
    s.bregman_tol = parse_double(key, value);
  } else if (key == "outer_max") {
    s.outer_max = parse_int32(key, value);
  } else if (key == "cgls_max") {
    s.cgls_max = parse_int32(key, value);
  } else if (key == "admm_max") {
    s.admm_max = parse_int32(key, value);
  } else if (key == "bregman_max") {
    s.bregman_max = parse_int32(key, value);
  } else if (key == "sb_penalty_scale") {
    s.sb_penalty_scale = parse_double(key, value);
  } else if (key == "gs_sweeps") {
    s.gs_sweeps = parse_int32(key, value);
  } else if (key == "cgls_warm_start") {
    s.cgls_warm_start = parse_bool(key, value);
  } else if (key == "psi_step") {
    if (value == "normalize")
      s.psi_step = PsiStep::Normalize;
    else if (value == "project")
      s.psi_step = PsiStep::Project;
    else
      throw ParameterError("psi_step must be normalize or project");
  } else if (key == "means") {
    cfg.means = parse_list(key, value);
  } else if (key == "std_devs") {
    cfg.std_devs = parse_list(key, value);
  } else if (key == "pgm") {
    if (value == "ascii" || value == "P2")
      cfg.pgm_format = PgmFormat::Ascii;
    else if (value == "binary" || value == "P5")
      cfg.pgm_format = PgmFormat::Binary;
    else
      throw ParameterError("pgm must be ascii or binary");
  } else if (key == "artifacts") {
    cfg.write_artifacts = parse_bool(key, value);
  } else if (key == "export_matrix") {
    cfg.export_matrix = value;
  } else if (key == "threads") {
    cfg.threads = parse_int32(key, value);
  } else {
    throw ParameterError("unknown setting '" + key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::size_t RunReport::failed_trials() const {
  std::size_t n_failed = 0;
  for (const auto& t : trials) n_failed += !t.ok();
  return n_failed;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir))
    throw IoError("cannot create output directory " + cfg.out_dir.string());

  const Phantom phantom = make_phantom(cfg.phantom, cfg.n);
  const ClassPrior prior = cfg.means.empty() ? phantom.prior() : ClassPrior(cfg.means, cfg.std_devs);
  if (prior.classes() != phantom.labels.classes && !cfg.means.empty())
    throw ParameterError("prior class count does not match the phantom");

  const int detectors = resolved_detectors(cfg);
  const std::vector<double> angles = cfg.angles.angles();
  const SystemMatrix a = build_parallel_geometry(cfg.n, detectors, angles);
  const std::vector<double> clean = srs::apply(a, phantom.image.values);

  RunReport report;
  report.n = cfg.n;
  report.detectors = detectors;
  report.rays = a.rows();
  report.pixels = a.cols();
  report.trials.resize(static_cast<std::size_t>(cfg.trials));

  if (!cfg.export_matrix.empty()) {
    write_triplets(a, cfg.export_matrix);
    report.files.push_back(cfg.export_matrix);
  }

  double isolation_threshold = 0.0;
  for (double s : prior.std_devs) isolation_threshold = std::max(isolation_threshold, 2.0 * s);

  std::unique_ptr<SrsResult> first;
  const int workers = worker_count(cfg);
  const int trial_count = cfg.trials;
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (int t = 0; t < trial_count; ++t) {
    TrialResult& tr = report.trials[static_cast<std::size_t>(t)];
    tr.seed = cfg.seed + static_cast<std::uint64_t>(t);
    try {
      SrsProblem prob;
      prob.a = &a;
      prob.b = add_noise(clean, cfg.noise, tr.seed).values;
      prob.prior = prior;
      prob.n = cfg.n;
      SrsResult res = run_srs(prob, cfg.solver, cfg.variant);
      tr.seconds = res.seconds;
      tr.outer_iters = res.iterations;
      tr.rec_err = rec_err(res.x.values, phantom.image.values);
      tr.seg_err = seg_err(res.labels, phantom.labels);
      tr.isolated_points = count_isolated_points(res.x.values, cfg.n, isolation_threshold);
      if (t == 0) first = std::make_unique<SrsResult>(std::move(res));
    } catch (const std::bad_alloc&) {
      tr.status = "failed:memory";
    } catch (const NumericalError&) {
      tr.status = "failed:numerical";
    } catch (const UndefinedMetricError&) {
      tr.status = "failed:metric";
    } catch (const std::exception&) {
      tr.status = "failed:error";
    }
  }
  aggregate(report);

  const auto report_path = cfg.out_dir / "report.csv";
  write_report_csv(report, report_path);
  report.files.push_back(report_path);
  if (cfg.write_artifacts) {
    const auto ph_img = cfg.out_dir / "phantom.pgm";
    const auto ph_lab = cfg.out_dir / "phantom_labels.csv";
    write_pgm(phantom.image, ph_img, cfg.pgm_format);
    write_labels_csv(phantom.labels, cfg.n, ph_lab);
    report.files.insert(report.files.end(), {ph_img, ph_lab});
    if (first) {
      const auto x_path = cfg.out_dir / "x_final.pgm";
      const auto l_path = cfg.out_dir / "labels.csv";
      const auto e_path = cfg.out_dir / "energy_trace.csv";
      write_pgm(first->x, x_path, cfg.pgm_format);
      write_labels_csv(first->labels, cfg.n, l_path);
      write_energy_trace_csv(first->trace, e_path);
      report.files.insert(report.files.end(), {x_path, l_path, e_path});
    }
  }
  return report;
}

int sweep_detectors(int n) { return static_cast<int>(std::lround(91.0 * n / 64.0)); }

double sweep_angle_step(int n) { return 6.0 * 64.0 / n; }

std::vector<RunReport> scale_sweep(const ExperimentConfig& base, const std::vector<int>& sides) {
  for (int n : sides)
    if (n != 64 && n != 128 && n != 256 && n != 512)
      throw ParameterError("sweep sides must be 64, 128, 256 or 512; got " + std::to_string(n));
  std::vector<RunReport> reports;
  for (int n : sides) {
    ExperimentConfig cfg = base;
    cfg.n = n;
    cfg.detectors = sweep_detectors(n);
    const double step = sweep_angle_step(n);
    cfg.angles = AngleSpec{step, step, 180.0};
    cfg.out_dir = base.out_dir / ("n" + std::to_string(n));
    try {
      reports.push_back(run_experiment(cfg));
    } catch (const std::bad_alloc&) {
      RunReport failed;
      failed.n = n;
      failed.detectors = cfg.detectors;
      failed.pixels = static_cast<std::size_t>(n) * n;
      failed.trials.assign(static_cast<std::size_t>(cfg.trials), TrialResult{});
      for (auto& t : failed.trials) t.status = "failed:memory";
      aggregate(failed);
      reports.push_back(std::move(failed));
    }
  }
  std::filesystem::create_directories(base.out_dir);
  write_sweep_csv(reports, base.out_dir / "sweep.csv");
  return reports;
}

void write_report_csv(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << "seed,rec_err,seg_err,seconds,outer_iters,status\n";
  for (const auto& t : report.trials) {
    if (t.ok())
      os << t.seed << ',' << fmt(t.rec_err) << ',' << fmt(t.seg_err) << ',' << fmt(t.seconds)
         << ',' << t.outer_iters << ",ok\n";
    else
      os << t.seed << ",nan,nan," << fmt(t.seconds) << ',' << t.outer_iters << ',' << t.status
         << '\n';
  }
  os << "mean," << fmt(report.mean_rec_err) << ',' << fmt(report.mean_seg_err) << ','
     << fmt(report.mean_seconds) << ',' << fmt(report.mean_outer_iters) << ','
     << (report.failed_trials() == 0 ? "ok" : "partial") << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

void write_energy_trace_csv(const std::vector<EnergyRecord>& trace,
                            const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << "iter,E0,F,rel_change_x\n" << std::setprecision(17);
  for (const auto& r : trace)
    os << r.iteration << ',' << r.e0 << ',' << r.f << ',' << r.rel_change_x << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

void write_sweep_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << "n,detectors,rays,pixels,rate,mean_seconds,mean_outer_iters,mean_rec_err,mean_seg_err,"
        "failed_trials\n";
  for (const auto& r : reports) {
    const double rate = r.pixels ? static_cast<double>(r.rays) / r.pixels : 0.0;
    os << r.n << ',' << r.detectors << ',' << r.rays << ',' << r.pixels << ',' << fmt(rate) << ','
       << fmt(r.mean_seconds) << ',' << fmt(r.mean_outer_iters) << ',' << fmt(r.mean_rec_err)
       << ',' << fmt(r.mean_seg_err) << ',' << r.failed_trials() << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace srs
