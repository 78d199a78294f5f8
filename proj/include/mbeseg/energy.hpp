#pragma once
#include "mbeseg/field.hpp"
#include "mbeseg/levelset.hpp"

namespace mbeseg {

struct RegularizerSpec {
  enum class Kind { mbe, dr1, dr2 };
  Kind kind = Kind::mbe;
  double mu = 1.0;
  double alpha = 1.0; // mbe only
};

struct FidelitySpec {
  enum class Kind { gac, rsf };
  Kind kind = Kind::rsf;
  // gac
  double lambda = 5.0;
  double gamma = 1.0;
  double sigma_edge = 1.5;
  // rsf
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double sigma = 3.0;
  double nu = 0.0;
};

// Diffusion rates of the distance-regularized baselines.
//   d1(s) = 1 - 1/s                (s floored at 1e-8)
//   d2(s) = sin(2 pi s)/(2 pi s)   for s <= 1, 1 - 1/s for s > 1
double dr1_rate(double s);
double dr2_rate(double s);
// Their potentials r1(s) = (s-1)^2/2 and the double-well r2(s).
double dr1_potential(double s);
double dr2_potential(double s);

// MBE regularizer (mu excluded; weights are applied at assembly):
//   E = sum (alpha/2)(lap phi)^2 + (1/4)(|grad phi|^2 - 1)^2
//   force = -alpha lap^2 phi + div((|grad phi|^2 - 1) grad phi)
// The force is the exact negative gradient of the discrete energy.
double mbe_energy(const ScalarField2D& phi, double alpha);
ScalarField2D mbe_force(const ScalarField2D& phi, double alpha);

// DR baselines: E = sum r_k(|grad phi|), force = div(d_k(|grad phi|) grad phi).
double dr1_energy(const ScalarField2D& phi);
ScalarField2D dr1_force(const ScalarField2D& phi);
double dr2_energy(const ScalarField2D& phi);
ScalarField2D dr2_force(const ScalarField2D& phi);

// g = 1 / (1 + |grad(G_sigma * I)|^2), in (0, 1].
ScalarField2D edge_indicator(const ScalarField2D& image, double sigma_edge);

// GAC: S = lambda sum g delta(phi)|grad phi| + gamma sum g H(-phi)
//      force = lambda delta(phi) div(g grad phi / |grad phi|) + gamma g delta(phi)
double gac_energy(const ScalarField2D& phi, const ScalarField2D& g,
                  double lambda, double gamma, const DiracSpec& dirac);
ScalarField2D gac_force(const ScalarField2D& phi, const ScalarField2D& g,
                        double lambda, double gamma, const DiracSpec& dirac);

struct RSFFit {
  ScalarField2D f1, f2; // local fitting functions
  ScalarField2D e1, e2; // pointwise fitting errors, >= 0
};

// f_i = K_sigma*(M_i I) / max(K_sigma*M_i, 1e-12), M1 = H(phi), M2 = 1 - M1;
// where the floor binds, f_i falls back to the global image mean.
// e_i = I^2 - 2 I (K*f_i) + K*(f_i^2)  (kernel normalized so K*1 = 1).
RSFFit rsf_fit(const ScalarField2D& phi, const ScalarField2D& image, double sigma);

// S = lambda1 sum e1 M1 + lambda2 sum e2 M2 + nu sum delta(phi)|grad phi|
// force = -delta(phi)(lambda1 e1 - lambda2 e2) + nu delta(phi) div(grad phi/|grad phi|)
double rsf_energy(const ScalarField2D& phi, const RSFFit& fit,
                  double lambda1, double lambda2, double nu, const DiracSpec& dirac);
ScalarField2D rsf_force(const ScalarField2D& phi, const RSFFit& fit,
                        double lambda1, double lambda2, double nu, const DiracSpec& dirac);

// Per-run fidelity context. g is fixed by the image; the RSF fit is lagged:
// refresh_fidelity recomputes it from the current phi once per time step.
struct FidelityTerms {
  FidelitySpec spec;
  ScalarField2D image;
  ScalarField2D g;       // gac
  RSFFit fit;            // rsf
  ScalarField2D k_image; // K_sigma * I, precomputed for the fit updates
};

FidelityTerms make_fidelity_terms(const FidelitySpec& spec, const ScalarField2D& image);
void refresh_fidelity(FidelityTerms& terms, const ScalarField2D& phi);

double fidelity_energy(const FidelityTerms& terms, const ScalarField2D& phi,
                       const DiracSpec& dirac);
ScalarField2D fidelity_force(const FidelityTerms& terms, const ScalarField2D& phi,
                             const DiracSpec& dirac);

// E1 = mu * (non-quadratic regularizer part) + fidelity + c0. The quadratic
// MBE part (alpha/2)(lap phi)^2 lives in L, so for MBE only the well term
// enters; DR baselines contribute their whole potential. Errors if E1 <= 0.
double assemble_E1(const ScalarField2D& phi, const RegularizerSpec& reg,
                   const FidelityTerms& terms, const DiracSpec& dirac, double c0);

// U = dE1/dphi (variational derivative of the non-quadratic energy), so the
// evolution reads d phi/dt = -(L phi + U).
ScalarField2D assemble_U(const ScalarField2D& phi, const RegularizerSpec& reg,
                         const FidelityTerms& terms, const DiracSpec& dirac);

} // namespace mbeseg
