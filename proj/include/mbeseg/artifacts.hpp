#pragma once
#include <string>

#include "mbeseg/config.hpp"
#include "mbeseg/solver.hpp"

namespace mbeseg {

// Writes the emit-selected artifacts for a finished run into cfg.out_dir:
//   mask.png             8-bit, 255 = interior
//   overlay.png          RGB, image in gray with the zero contour in red
//   contours.txt         one "x y" vertex per line, blank line between curves
//   gradmap.png          8-bit, |grad phi| scaled to [min,max] recorded in
//   gradmap_scale.txt    the sidecar
//   trace.csv            iter,E_mod,E1,r,grad_max,grad_mean at 17 digits
//   final_phi.csv        "width,height" header then one row per scanline
// plus, always, config_resolved.ini and manifest.txt naming every file
// written. The directory is created if missing.
void emit_artifacts(const SegmentationResult& res, const ScalarField2D& image,
                    const RunConfig& cfg);

// Fixture export for the CLI: image.png (16-bit, linearly scaled to the full
// range), truth_mask.png, fixture_spec.txt recording the generating spec and
// the scale bounds, and manifest.txt.
void emit_fixture(const Fixture& fx, const FixtureSpec& spec,
                  const std::string& dir);

} // namespace mbeseg
