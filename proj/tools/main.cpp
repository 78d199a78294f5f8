// mbeseg: variational level-set segmentation without re-initialization.
// Verbs: run, fixture, suite, metrics. Exit codes: 0 ok, 2 config error,
// 3 numerical divergence, 4 I/O or format error.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "mbeseg/artifacts.hpp"
#include "mbeseg/bench.hpp"
#include "mbeseg/config.hpp"
#include "mbeseg/image_io.hpp"
#include "mbeseg/solver.hpp"
#include "mbeseg/suite.hpp"

namespace {

int exit_code(mbeseg::ErrorKind k) {
  using mbeseg::ErrorKind;
  switch (k) {
    case ErrorKind::divergence: return 3;
    case ErrorKind::io:
    case ErrorKind::format: return 4;
    default: return 2; // config-class: bad values, bad grids, bad keys
  }
}

std::set<std::string> parse_emit_list(const std::string& list) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = list.find(',', pos);
    const std::string tok =
        list.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) {
      if (!mbeseg::valid_emit_tokens().count(tok))
        mbeseg::fail(mbeseg::ErrorKind::config,
                     "unknown emit token '" + tok + "'");
      out.insert(tok);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty())
    mbeseg::fail(mbeseg::ErrorKind::config, "empty emit list");
  return out;
}

struct RunArgs {
  std::string config_path;
  std::string out_dir; // empty: keep the config's
  std::string emit;    // empty: keep the config's
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  bool tol_set = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& args) {
  mbeseg::RunConfig cfg = mbeseg::parse_config(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.emit.empty()) cfg.emit = parse_emit_list(args.emit);
  if (args.seed_set) cfg.fixture.seed = args.seed;
  if (args.tol_set) cfg.model.tol = args.tol;
  if (args.quiet) cfg.quiet = true;

  mbeseg::ScalarField2D image =
      cfg.source == mbeseg::RunConfig::Source::fixture
          ? mbeseg::generate(cfg.fixture).image
          : mbeseg::load_image(cfg.image_path);

  mbeseg::SegmentationResult res =
      mbeseg::run(cfg.model, image, cfg.init, cfg.quiet);
  mbeseg::emit_artifacts(res, image, cfg);

  if (res.status == mbeseg::RunStatus::diverged) {
    std::fprintf(stderr, "error: %s\n", res.message.c_str());
    std::printf("diverged at iteration %d -> %s\n", res.state.iter,
                cfg.out_dir.c_str());
    return 3;
  }
  std::printf("%s after %d iterations -> %s\n",
              res.status == mbeseg::RunStatus::tol_reached
                  ? "tolerance reached"
                  : "completed",
              res.state.iter, cfg.out_dir.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"level-set segmentation with MBE regularization"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run a segmentation from a config file");
  run_cmd->add_option("config", run_args.config_path, "config file (INI)")
      ->required();
  run_cmd->add_option("-o,--out", run_args.out_dir, "override output dir");
  run_cmd->add_option("--emit", run_args.emit,
                      "comma list of mask,contour_overlay,gradmap,trace,final_phi");
  run_cmd->add_option("--seed", run_args.seed, "override fixture noise seed");
  run_cmd->add_option("--tol", run_args.tol, "override stop tolerance");
  run_cmd->add_flag("--quiet", run_args.quiet, "no progress output");

  std::string fx_spec, fx_out = "fixture_out";
  std::uint64_t fx_seed = 0;
  CLI::App* fx_cmd =
      app.add_subcommand("fixture", "generate a synthetic test image");
  fx_cmd->add_option("spec", fx_spec, "kind[,key=value,...]")->required();
  fx_cmd->add_option("-o,--out", fx_out, "output dir");
  fx_cmd->add_option("--seed", fx_seed, "override noise seed");

  std::string suite_name, suite_out;
  int suite_jobs = 0;
  bool suite_quiet = false;
  CLI::App* suite_cmd =
      app.add_subcommand("suite", "run a reproduction suite");
  suite_cmd->add_option("name", suite_name, "suite name")->required();
  suite_cmd->add_option("-o,--out", suite_out, "output dir (default: name)");
  suite_cmd->add_option("--jobs", suite_jobs, "parallel members (0 = auto)");
  suite_cmd->add_flag("--quiet", suite_quiet, "no per-member output");

  std::string metrics_a, metrics_b;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "overlap metrics of two mask images");
  metrics_cmd->add_option("mask_a", metrics_a, "first mask PNG/PGM")->required();
  metrics_cmd->add_option("mask_b", metrics_b, "second mask PNG/PGM")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      run_args.seed_set = run_cmd->count("--seed") > 0;
      run_args.tol_set = run_cmd->count("--tol") > 0;
      return cmd_run(run_args);
    }
    if (fx_cmd->parsed()) {
      mbeseg::FixtureSpec spec = mbeseg::parse_fixture_spec(fx_spec);
      if (fx_cmd->count("--seed") > 0) spec.seed = fx_seed;
      const mbeseg::Fixture fx = mbeseg::generate(spec);
      mbeseg::emit_fixture(fx, spec, fx_out);
      std::printf("%s -> %s\n", mbeseg::dump_fixture_spec(spec).c_str(),
                  fx_out.c_str());
      return 0;
    }
    if (suite_cmd->parsed()) {
      if (suite_out.empty()) suite_out = suite_name;
      const mbeseg::SuiteReport rep =
          mbeseg::repro_suite(suite_name, suite_out, suite_jobs, suite_quiet);
      std::printf("suite %s: %zu members, %s -> %s\n", rep.name.c_str(),
                  rep.members.size(),
                  rep.all_completed ? "all completed" : "FAILED", suite_out.c_str());
      if (!rep.all_completed) {
        for (const mbeseg::SuiteMemberReport& r : rep.members)
          if (!r.ok)
            std::fprintf(stderr, "error: member %s: %s\n", r.name.c_str(),
                         r.message.c_str());
        return 3;
      }
      return 0;
    }
    if (metrics_cmd->parsed()) {
      const mbeseg::ScalarField2D a = mbeseg::load_mask_image(metrics_a);
      const mbeseg::ScalarField2D b = mbeseg::load_mask_image(metrics_b);
      std::printf("dice = %.6f\niou = %.6f\n", mbeseg::dice(a, b),
                  mbeseg::iou(a, b));
      return 0;
    }
  } catch (const mbeseg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  }
  return 0;
}
