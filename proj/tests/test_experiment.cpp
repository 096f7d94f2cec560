#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "srs/experiment.hpp"

namespace srs {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("srs_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

// Drops the seconds column.
std::vector<std::string> without_seconds(const std::vector<std::string>& lines) {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    auto f = split(l);
    f.erase(f.begin() + 3);
    std::string joined;
    for (const auto& x : f) joined += x + ",";
    out.push_back(joined);
  }
  return out;
}

ExperimentConfig tiny(const fs::path& out) {
  ExperimentConfig cfg = ExperimentConfig::preset(PhantomKind::Piecewise);
  cfg.n = 16;
  cfg.angles = AngleSpec{12, 12, 180};
  cfg.solver.outer_max = 3;
  cfg.out_dir = out;
  return cfg;
}

TEST(Config, PresetsAndSettings) {
  const auto pw = ExperimentConfig::preset(PhantomKind::Piecewise);
  EXPECT_DOUBLE_EQ(pw.solver.lambda_n, 0.2);
  EXPECT_DOUBLE_EQ(pw.solver.gamma2, 2.0);
  EXPECT_DOUBLE_EQ(pw.noise, 0.05);
  const auto sm = ExperimentConfig::preset(PhantomKind::Smooth);
  EXPECT_DOUBLE_EQ(sm.solver.lambda_n, 123.0);
  EXPECT_DOUBLE_EQ(sm.solver.lambda_t, 35.0);
  EXPECT_EQ(pw.angles.angles().size(), 30u);

  ExperimentConfig cfg;
  apply_setting(cfg, "n", "128");
  apply_setting(cfg, " lambda_c ", " 0.5 ");
  apply_setting(cfg, "angles", "3:3:180");
  apply_setting(cfg, "variant", "model-9");
  apply_setting(cfg, "means", "0, 0.5,1");
  apply_setting(cfg, "std_devs", "0.1,0.1,0.1");
  EXPECT_EQ(cfg.n, 128);
  EXPECT_DOUBLE_EQ(cfg.solver.lambda_c, 0.5);
  EXPECT_EQ(cfg.angles.angles().size(), 60u);
  EXPECT_EQ(cfg.variant, Variant::Model9);
  EXPECT_EQ(cfg.means, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(resolved_detectors(cfg), 182);
  EXPECT_NO_THROW(cfg.validate());

  EXPECT_THROW(apply_setting(cfg, "colour", "red"), ParameterError);
  EXPECT_THROW(apply_setting(cfg, "n", "12x"), ParameterError);
  EXPECT_THROW(apply_setting(cfg, "angles", "6:6"), ParameterError);
  EXPECT_THROW(apply_setting(cfg, "seed", "-3"), ParameterError);
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Config, ReadsFlatFile) {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "a.cfg");
    os << "# comment\nphantom = smooth\n\nn=32  # trailing\nnoise = 0.02\n";
  }
  const auto kv = read_config_file(dir / "a.cfg");
  EXPECT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv.at("n"), "32");
  {
    std::ofstream os(dir / "b.cfg");
    os << "just words\n";
  }
  EXPECT_THROW(read_config_file(dir / "b.cfg"), ParameterError);
  EXPECT_THROW(read_config_file(dir / "missing.cfg"), ParameterError);
}

TEST(Experiment, SingleNoiseFreeTrialReport) {
  const fs::path out = scratch("single");
  ExperimentConfig cfg = tiny(out);
  cfg.noise = 0.0;
  const RunReport r = run_experiment(cfg);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.failed_trials(), 0u);
  EXPECT_DOUBLE_EQ(r.mean_rec_err, r.trials[0].rec_err);
  EXPECT_DOUBLE_EQ(r.mean_seg_err, r.trials[0].seg_err);
  const auto lines = read_lines(out / "report.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "seed,rec_err,seg_err,seconds,outer_iters,status");
  const auto row = split(lines[1]), agg = split(lines[2]);
  EXPECT_EQ(agg[0], "mean");
  EXPECT_EQ(row[1], agg[1]);
  EXPECT_EQ(row[2], agg[2]);
  for (const char* f : {"x_final.pgm", "labels.csv", "energy_trace.csv", "phantom.pgm"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(read_lines(out / "labels.csv").size(), 16u);
  EXPECT_EQ(read_lines(out / "energy_trace.csv").size(), 1u + r.trials[0].outer_iters);
  const auto raw = read_pgm_raw(out / "x_final.pgm");
  EXPECT_EQ(raw.size(), 256u);
}

TEST(Experiment, AggregateIsTrialMean) {
  ExperimentConfig cfg = tiny(scratch("mean"));
  cfg.trials = 3;
  cfg.write_artifacts = false;
  const RunReport r = run_experiment(cfg);
  double rec = 0.0, seg = 0.0;
  for (const auto& t : r.trials) rec += t.rec_err, seg += t.seg_err;
  EXPECT_NEAR(r.mean_rec_err, rec / 3.0, 1e-12);
  EXPECT_NEAR(r.mean_seg_err, seg / 3.0, 1e-12);
  EXPECT_EQ(r.trials[2].seed, cfg.seed + 2);
  EXPECT_NE(r.trials[0].rec_err, r.trials[1].rec_err);
}

TEST(Experiment, ReproducibleAndThreadIndependent) {
  ExperimentConfig cfg = tiny(scratch("rep_a"));
  cfg.trials = 3;
  cfg.threads = 1;
  run_experiment(cfg);
  const auto a = without_seconds(read_lines(cfg.out_dir / "report.csv"));
  cfg.out_dir = scratch("rep_b");
  run_experiment(cfg);
  EXPECT_EQ(a, without_seconds(read_lines(cfg.out_dir / "report.csv")));
  cfg.out_dir = scratch("rep_c");
  cfg.threads = 2;
  run_experiment(cfg);
  EXPECT_EQ(a, without_seconds(read_lines(cfg.out_dir / "report.csv")));
}

TEST(Experiment, UnwritableOutputIsIoError) {
  const fs::path blocker = scratch("blocker");
  { std::ofstream os(blocker); os << "x"; }
  ExperimentConfig cfg = tiny(blocker / "sub");
  EXPECT_THROW(run_experiment(cfg), IoError);
}

TEST(Sweep, GeometryHelpers) {
  EXPECT_EQ(sweep_detectors(64), 91);
  EXPECT_EQ(sweep_detectors(128), 182);
  EXPECT_DOUBLE_EQ(sweep_angle_step(64), 6.0);
  EXPECT_DOUBLE_EQ(sweep_angle_step(128), 3.0);
  EXPECT_DOUBLE_EQ(sweep_angle_step(512), 0.75);
  for (int n : {64, 128, 256}) {
    const double step = sweep_angle_step(n);
    const std::size_t rays = angle_range(step, step, 180).size() * sweep_detectors(n);
    EXPECT_NEAR(static_cast<double>(rays) / (n * n), 0.667, 0.002) << n;
  }
  EXPECT_THROW(scale_sweep(ExperimentConfig{}, {96}), ParameterError);
}

TEST(Sweep, RunsAndWritesSummary) {
  ExperimentConfig cfg = tiny(scratch("sweep"));
  cfg.solver.outer_max = 1;
  cfg.write_artifacts = false;
  const auto reports = scale_sweep(cfg, {64});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].n, 64);
  EXPECT_EQ(reports[0].rays, 30u * 91u);
  EXPECT_TRUE(fs::exists(cfg.out_dir / "n64" / "report.csv"));
  EXPECT_EQ(read_lines(cfg.out_dir / "sweep.csv").size(), 2u);
}

}  // namespace
}  // namespace srs
