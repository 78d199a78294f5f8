#pragma once
#include <string>
#include <vector>

#include "mbeseg/config.hpp"

namespace mbeseg {

struct SuiteMember {
  std::string name;
  RunConfig config;
};

struct SuiteMemberReport {
  std::string name;
  bool ok = false; // run finished (completed or tol_reached) and emitted
  RunStatus status = RunStatus::completed;
  double dice_truth = -1.0; // vs fixture truth mask, -1 when not applicable
  double grad_max = 0.0;    // max |grad phi| at the final state
  bool monotone = true;     // modified-energy decay within slack (SAV only)
  double seconds = 0.0;
  std::string message;
};

struct SuiteReport {
  std::string name;
  std::vector<SuiteMemberReport> members;
  bool all_completed = false;
};

std::vector<std::string> suite_names();
// The member list (names + fully resolved configs) for a named suite rooted
// at out_dir; unknown names raise a config error.
std::vector<SuiteMember> suite_members(const std::string& name,
                                       const std::string& out_dir);

// Runs every member (jobs in parallel, each member single-threaded), emits
// per-member artifact directories, and writes summary.txt and summary.csv.
// Wall-clock timings appear only in the summary, never in member artifacts.
SuiteReport repro_suite(const std::string& name, const std::string& out_dir,
                        int jobs, bool quiet);

} // namespace mbeseg
