#pragma once
#include <set>
#include <string>

#include "mbeseg/bench.hpp"
#include "mbeseg/levelset.hpp"
#include "mbeseg/solver.hpp"

namespace mbeseg {

// A fully resolved run description. Parsed from an INI-style file with
// [input], [init], [model], [output] sections; every key has a default except
// the input source and the init shape geometry. Unknown keys are errors.
struct RunConfig {
  enum class Source { fixture, image };
  Source source = Source::fixture;
  FixtureSpec fixture;
  std::string image_path;

  InitSpec init;
  ModelSpec model;

  std::string out_dir = "out";
  std::set<std::string> emit; // of: mask contour_overlay gradmap trace final_phi
  bool quiet = false;
};

RunConfig parse_config(const std::string& path);
// Same parser on in-memory text; name is used in error messages.
RunConfig parse_config_text(const std::string& text, const std::string& name);

// Canonical INI dump of a resolved config; parse_config_text(dump_config(c))
// reproduces c exactly.
std::string dump_config(const RunConfig& cfg);

const std::set<std::string>& valid_emit_tokens();

// Compact fixture grammar for the command line:
//   kind[,key=value,...]   e.g. "ring,inner_radius=24,outer_radius=44,seed=1"
FixtureSpec parse_fixture_spec(const std::string& text);
std::string dump_fixture_spec(const FixtureSpec& spec);

} // namespace mbeseg
