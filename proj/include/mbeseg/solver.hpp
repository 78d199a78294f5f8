#pragma once
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mbeseg/energy.hpp"
#include "mbeseg/field.hpp"
#include "mbeseg/levelset.hpp"

namespace mbeseg {

enum class Scheme { sav, fdm };

struct ModelSpec {
  FidelitySpec fidelity;
  RegularizerSpec regularizer;
  DiracSpec dirac;
  Scheme scheme = Scheme::sav;
  double tau = 0.01;
  int iter_max = 1000;
  double tol = 0.0; // 0 disables the early stop
  double c0 = 1.0;  // additive shift keeping E1 positive
};

// Real symbols over the half spectrum of the width x height r2c transform
// (spec_width = width/2 + 1 complex columns, height rows).
struct SpectralSymbols {
  int width = 0, height = 0;
  int spec_width = 0;
  std::vector<double> lap;         // 2cos z1 - 2 + 2cos z2 - 2, in [-8, 0]
  std::vector<double> biharm;      // lap^2
  std::vector<double> a_inv;       // SAV: 1/(1 + tau mu alpha lap^2)
  std::vector<double> fdm_lhs_inv; // FDM implicit part, see build_symbols
};

// FDM left-hand symbols: MBE uses the convex splitting
// 1 + tau mu ((3/4) alpha lap^2 + lap), which requires tau mu < 3 alpha; the
// DR baselines make the plain Laplacian implicit, 1 - tau mu lap >= 1. A
// symbol not bounded away from zero raises a scheme-instability error.
SpectralSymbols build_symbols(int width, int height, double tau,
                              const RegularizerSpec& reg, Scheme scheme);
SpectralSymbols build_symbols(int width, int height, double tau, double mu,
                              double alpha, Scheme scheme);

// FFTW plans and buffers for one grid size. Not copyable; one per evolver.
class SpectralWorkspace {
public:
  SpectralWorkspace(int width, int height);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  // out = F^{-1}[ sym .* F in ], sym real on the half spectrum.
  ScalarField2D apply_symbol(const ScalarField2D& in, const std::vector<double>& sym);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ScalarField2D apply_A_inverse(const ScalarField2D& f, const SpectralSymbols& sym,
                              SpectralWorkspace& ws);

struct LevelSetState {
  ScalarField2D phi;
  double r = 0.0; // SAV auxiliary, r0 = sqrt(E1(phi0))
  int iter = 0;
};

struct TraceRow {
  int iter;
  double e_mod, e1, r, grad_max, grad_mean;
};

struct EnergyTrace {
  std::vector<TraceRow> rows;
  void write_csv(std::ostream& os) const; // 17 significant digits
};

enum class RunStatus { completed, tol_reached, diverged };

struct SegmentationResult {
  LevelSetState state;
  ScalarField2D mask;     // H(phi)
  std::vector<Polyline> contours;
  ScalarField2D grad_map; // |grad phi|, no floor
  EnergyTrace trace;      // one row per iteration plus the initial row
  RunStatus status = RunStatus::completed;
  std::string message;
};

// One model bound to one image: owns the spectral plans and the lagged
// fidelity terms. Steps mutate the state in place.
class Evolver {
public:
  Evolver(const ModelSpec& model, const ScalarField2D& image);

  LevelSetState init_state(const InitSpec& init);

  struct StepInfo {
    double e1 = 0.0;       // E1(phi^n) used by the step
    double delta_max = 0.0; // max |phi^{n+1} - phi^n|
  };
  StepInfo sav_step(LevelSetState& state);
  StepInfo fdm_step(LevelSetState& state);
  StepInfo step(LevelSetState& state); // dispatch on model.scheme

  // Modified energy 0.5 (phi, L phi) + r^2 with L = mu alpha lap^2 (stencil
  // form; L = 0 for the DR baselines).
  double modified_energy(const LevelSetState& state) const;
  // E1(phi) after refreshing the lagged fit at phi.
  double aux_energy(const ScalarField2D& phi);

  const ModelSpec& model() const { return model_; }
  const SpectralSymbols& symbols() const { return sym_; }
  const FidelityTerms& terms() const { return terms_; }
  // E1 computed by the most recent init_state/step/aux_energy call.
  double last_e1() const { return last_e1_; }

private:
  ModelSpec model_;
  FidelityTerms terms_;
  SpectralSymbols sym_;
  SpectralWorkspace ws_;
  double last_e1_ = 0.0;
  void check_finite(const ScalarField2D& phi, int iter) const;
};

// Full pipeline: init, iterate, trace, then mask / contours / gradient map
// from the final state. Divergence is reported in status/message with the
// partial trace preserved; other errors propagate.
SegmentationResult run(const ModelSpec& model, const ScalarField2D& image,
                       const InitSpec& init, bool quiet = true);

} // namespace mbeseg
