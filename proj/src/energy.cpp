#include "mbeseg/energy.hpp"

#include <cmath>
#include <string>

namespace mbeseg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCurvatureFloor = 1e-8;
constexpr double kFitFloor = 1e-12;

} // namespace

double dr1_rate(double s) {
  if (s < 1e-8) s = 1e-8;
  return 1.0 - 1.0 / s;
}

double dr2_rate(double s) {
  if (s > 1.0) return 1.0 - 1.0 / s;
  const double t = 2.0 * kPi * s;
  if (t < 1e-6) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

double dr1_potential(double s) { return 0.5 * (s - 1.0) * (s - 1.0); }

double dr2_potential(double s) {
  if (s > 1.0) return 0.5 * (s - 1.0) * (s - 1.0);
  return (1.0 - std::cos(2.0 * kPi * s)) / (4.0 * kPi * kPi);
}

// ---------- regularizers ----------

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    fail(ErrorKind::invalid_parameter, "mbe: alpha must be finite and >= 0");
}

// div(w(s) grad phi) with w computed from s = |grad phi| (no floor here;
// the rate functions handle their own small-s behavior).
ScalarField2D weighted_diffusion(const ScalarField2D& phi, double (*rate)(double)) {
  VectorField2D g = gradient_central(phi);
  VectorField2D flux(phi.width, phi.height);
  for (std::size_t k = 0; k < g.x.v.size(); ++k) {
    const double s = std::sqrt(g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k]);
    const double w = rate(s);
    flux.x.v[k] = w * g.x.v[k];
    flux.y.v[k] = w * g.y.v[k];
  }
  return divergence_central(flux);
}

} // namespace

double mbe_energy(const ScalarField2D& phi, double alpha) {
  check_alpha(alpha);
  ScalarField2D lap = laplacian(phi);
  VectorField2D g = gradient_central(phi);
  double e = 0.0;
  for (std::size_t k = 0; k < phi.v.size(); ++k) {
    const double s2 = g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k];
    e += 0.5 * alpha * lap.v[k] * lap.v[k] + 0.25 * (s2 - 1.0) * (s2 - 1.0);
  }
  return e;
}

ScalarField2D mbe_force(const ScalarField2D& phi, double alpha) {
  check_alpha(alpha);
  VectorField2D g = gradient_central(phi);
  VectorField2D flux(phi.width, phi.height);
  for (std::size_t k = 0; k < g.x.v.size(); ++k) {
    const double w = g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k] - 1.0;
    flux.x.v[k] = w * g.x.v[k];
    flux.y.v[k] = w * g.y.v[k];
  }
  ScalarField2D out = divergence_central(flux);
  if (alpha != 0.0) {
    ScalarField2D bi = biharmonic(phi);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] -= alpha * bi.v[k];
  }
  return out;
}

double dr1_energy(const ScalarField2D& phi) {
  VectorField2D g = gradient_central(phi);
  double e = 0.0;
  for (std::size_t k = 0; k < g.x.v.size(); ++k)
    e += dr1_potential(std::sqrt(g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k]));
  return e;
}

ScalarField2D dr1_force(const ScalarField2D& phi) {
  return weighted_diffusion(phi, &dr1_rate);
}

double dr2_energy(const ScalarField2D& phi) {
  VectorField2D g = gradient_central(phi);
  double e = 0.0;
  for (std::size_t k = 0; k < g.x.v.size(); ++k)
    e += dr2_potential(std::sqrt(g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k]));
  return e;
}

ScalarField2D dr2_force(const ScalarField2D& phi) {
  return weighted_diffusion(phi, &dr2_rate);
}

// ---------- GAC ----------

ScalarField2D edge_indicator(const ScalarField2D& image, double sigma_edge) {
  ScalarField2D smooth = convolve_gaussian(image, sigma_edge);
  VectorField2D g = gradient_central(smooth);
  ScalarField2D out(image.width, image.height);
  for (std::size_t k = 0; k < out.v.size(); ++k)
    out.v[k] = 1.0 / (1.0 + g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k]);
  return out;
}

double gac_energy(const ScalarField2D& phi, const ScalarField2D& g,
                  double lambda, double gamma, const DiracSpec& dspec) {
  if (!phi.same_shape(g))
    fail(ErrorKind::invalid_grid, "gac_energy: phi and g shapes differ");
  ScalarField2D mag = gradient_magnitude(phi, 0.0);
  double e = 0.0;
  for (std::size_t k = 0; k < phi.v.size(); ++k)
    e += lambda * g.v[k] * dirac(phi.v[k], dspec) * mag.v[k] +
         gamma * g.v[k] * heaviside_sharp(-phi.v[k]);
  return e;
}

ScalarField2D gac_force(const ScalarField2D& phi, const ScalarField2D& g,
                        double lambda, double gamma, const DiracSpec& dspec) {
  if (!phi.same_shape(g))
    fail(ErrorKind::invalid_grid, "gac_force: phi and g shapes differ");
  VectorField2D gr = gradient_central(phi);
  VectorField2D flux(phi.width, phi.height);
  for (std::size_t k = 0; k < gr.x.v.size(); ++k) {
    double m = std::sqrt(gr.x.v[k] * gr.x.v[k] + gr.y.v[k] * gr.y.v[k]);
    if (m < kCurvatureFloor) m = kCurvatureFloor;
    flux.x.v[k] = g.v[k] * gr.x.v[k] / m;
    flux.y.v[k] = g.v[k] * gr.y.v[k] / m;
  }
  ScalarField2D curv = divergence_central(flux);
  ScalarField2D out(phi.width, phi.height);
  for (std::size_t k = 0; k < out.v.size(); ++k) {
    const double dl = dirac(phi.v[k], dspec);
    out.v[k] = lambda * dl * curv.v[k] + gamma * g.v[k] * dl;
  }
  return out;
}

// ---------- RSF ----------

namespace {

RSFFit fit_with_cached(const ScalarField2D& phi, const ScalarField2D& image,
                       double sigma, const ScalarField2D& k_image) {
  auto [m1, m2] = region_masks(phi);
  (void)m2;
  ScalarField2D m1i(phi.width, phi.height);
  for (std::size_t k = 0; k < m1.v.size(); ++k) m1i.v[k] = m1.v[k] * image.v[k];

  ScalarField2D km1 = convolve_gaussian(m1, sigma);
  ScalarField2D km1i = convolve_gaussian(m1i, sigma);

  const double mean = field_sum(image) / static_cast<double>(image.size());

  RSFFit fit;
  fit.f1 = ScalarField2D(phi.width, phi.height);
  fit.f2 = ScalarField2D(phi.width, phi.height);
  for (std::size_t k = 0; k < km1.v.size(); ++k) {
    const double den1 = km1.v[k];
    const double den2 = 1.0 - km1.v[k];
    const double num1 = km1i.v[k];
    const double num2 = k_image.v[k] - km1i.v[k];
    fit.f1.v[k] = den1 > kFitFloor ? num1 / den1 : mean;
    fit.f2.v[k] = den2 > kFitFloor ? num2 / den2 : mean;
  }

  ScalarField2D f1sq(phi.width, phi.height), f2sq(phi.width, phi.height);
  for (std::size_t k = 0; k < fit.f1.v.size(); ++k) {
    f1sq.v[k] = fit.f1.v[k] * fit.f1.v[k];
    f2sq.v[k] = fit.f2.v[k] * fit.f2.v[k];
  }
  ScalarField2D kf1 = convolve_gaussian(fit.f1, sigma);
  ScalarField2D kf2 = convolve_gaussian(fit.f2, sigma);
  ScalarField2D kf1sq = convolve_gaussian(f1sq, sigma);
  ScalarField2D kf2sq = convolve_gaussian(f2sq, sigma);

  fit.e1 = ScalarField2D(phi.width, phi.height);
  fit.e2 = ScalarField2D(phi.width, phi.height);
  for (std::size_t k = 0; k < fit.e1.v.size(); ++k) {
    const double I = image.v[k];
    double e1 = I * I - 2.0 * I * kf1.v[k] + kf1sq.v[k];
    double e2 = I * I - 2.0 * I * kf2.v[k] + kf2sq.v[k];
    fit.e1.v[k] = e1 < 0.0 ? 0.0 : e1;
    fit.e2.v[k] = e2 < 0.0 ? 0.0 : e2;
  }
  return fit;
}

} // namespace

RSFFit rsf_fit(const ScalarField2D& phi, const ScalarField2D& image, double sigma) {
  if (!phi.same_shape(image))
    fail(ErrorKind::invalid_grid, "rsf_fit: phi and image shapes differ");
  ScalarField2D k_image = convolve_gaussian(image, sigma);
  return fit_with_cached(phi, image, sigma, k_image);
}

double rsf_energy(const ScalarField2D& phi, const RSFFit& fit, double lambda1,
                  double lambda2, double nu, const DiracSpec& dspec) {
  ScalarField2D mag = gradient_magnitude(phi, 0.0);
  double e = 0.0;
  for (std::size_t k = 0; k < phi.v.size(); ++k) {
    const double m1 = heaviside_sharp(phi.v[k]);
    e += lambda1 * fit.e1.v[k] * m1 + lambda2 * fit.e2.v[k] * (1.0 - m1) +
         nu * dirac(phi.v[k], dspec) * mag.v[k];
  }
  return e;
}

ScalarField2D rsf_force(const ScalarField2D& phi, const RSFFit& fit, double lambda1,
                        double lambda2, double nu, const DiracSpec& dspec) {
  ScalarField2D out(phi.width, phi.height);
  if (nu != 0.0) {
    VectorField2D gr = gradient_central(phi);
    VectorField2D flux(phi.width, phi.height);
    for (std::size_t k = 0; k < gr.x.v.size(); ++k) {
      double m = std::sqrt(gr.x.v[k] * gr.x.v[k] + gr.y.v[k] * gr.y.v[k]);
      if (m < kCurvatureFloor) m = kCurvatureFloor;
      flux.x.v[k] = gr.x.v[k] / m;
      flux.y.v[k] = gr.y.v[k] / m;
    }
    out = divergence_central(flux);
  }
  for (std::size_t k = 0; k < out.v.size(); ++k) {
    const double dl = dirac(phi.v[k], dspec);
    out.v[k] = dl * (nu * out.v[k] -
                     (lambda1 * fit.e1.v[k] - lambda2 * fit.e2.v[k]));
  }
  return out;
}

// ---------- assembly ----------

FidelityTerms make_fidelity_terms(const FidelitySpec& spec, const ScalarField2D& image) {
  FidelityTerms t;
  t.spec = spec;
  t.image = image;
  if (spec.kind == FidelitySpec::Kind::gac) {
    if (!(spec.lambda >= 0.0))
      fail(ErrorKind::invalid_parameter, "gac: lambda must be >= 0");
    t.g = edge_indicator(image, spec.sigma_edge);
  } else {
    if (!(spec.lambda1 >= 0.0) || !(spec.lambda2 >= 0.0))
      fail(ErrorKind::invalid_parameter, "rsf: lambda1, lambda2 must be >= 0");
    if (!(spec.nu >= 0.0))
      fail(ErrorKind::invalid_parameter, "rsf: nu must be >= 0");
    t.k_image = convolve_gaussian(image, spec.sigma);
  }
  return t;
}

void refresh_fidelity(FidelityTerms& terms, const ScalarField2D& phi) {
  if (terms.spec.kind == FidelitySpec::Kind::rsf)
    terms.fit = fit_with_cached(phi, terms.image, terms.spec.sigma, terms.k_image);
}

double fidelity_energy(const FidelityTerms& terms, const ScalarField2D& phi,
                       const DiracSpec& dirac) {
  if (terms.spec.kind == FidelitySpec::Kind::gac)
    return gac_energy(phi, terms.g, terms.spec.lambda, terms.spec.gamma, dirac);
  if (terms.fit.e1.size() != phi.size())
    fail(ErrorKind::invalid_parameter, "fidelity_energy: rsf fit not refreshed");
  return rsf_energy(phi, terms.fit, terms.spec.lambda1, terms.spec.lambda2,
                    terms.spec.nu, dirac);
}

ScalarField2D fidelity_force(const FidelityTerms& terms, const ScalarField2D& phi,
                             const DiracSpec& dirac) {
  if (terms.spec.kind == FidelitySpec::Kind::gac)
    return gac_force(phi, terms.g, terms.spec.lambda, terms.spec.gamma, dirac);
  if (terms.fit.e1.size() != phi.size())
    fail(ErrorKind::invalid_parameter, "fidelity_force: rsf fit not refreshed");
  return rsf_force(phi, terms.fit, terms.spec.lambda1, terms.spec.lambda2,
                   terms.spec.nu, dirac);
}

namespace {

void check_reg(const RegularizerSpec& reg) {
  if (!(reg.mu > 0.0) || !std::isfinite(reg.mu))
    fail(ErrorKind::invalid_parameter, "regularizer: mu must be positive");
  if (reg.kind == RegularizerSpec::Kind::mbe &&
      (!(reg.alpha > 0.0) || !std::isfinite(reg.alpha)))
    fail(ErrorKind::invalid_parameter, "regularizer: mbe needs alpha > 0");
}

} // namespace

double assemble_E1(const ScalarField2D& phi, const RegularizerSpec& reg,
                   const FidelityTerms& terms, const DiracSpec& dirac, double c0) {
  check_reg(reg);
  double e = 0.0;
  switch (reg.kind) {
    case RegularizerSpec::Kind::mbe:
      // the quadratic (alpha/2)(lap phi)^2 part sits in L, not in E1
      e = reg.mu * mbe_energy(phi, 0.0);
      break;
    case RegularizerSpec::Kind::dr1:
      e = reg.mu * dr1_energy(phi);
      break;
    case RegularizerSpec::Kind::dr2:
      e = reg.mu * dr2_energy(phi);
      break;
  }
  e += fidelity_energy(terms, phi, dirac) + c0;
  if (!(e > 0.0))
    fail(ErrorKind::nonpositive_energy,
         "assemble_E1: E1 = " + std::to_string(e) + " is not positive");
  return e;
}

ScalarField2D assemble_U(const ScalarField2D& phi, const RegularizerSpec& reg,
                         const FidelityTerms& terms, const DiracSpec& dirac) {
  check_reg(reg);
  ScalarField2D reg_force(phi.width, phi.height);
  switch (reg.kind) {
    case RegularizerSpec::Kind::mbe:
      reg_force = mbe_force(phi, 0.0);
      break;
    case RegularizerSpec::Kind::dr1:
      reg_force = dr1_force(phi);
      break;
    case RegularizerSpec::Kind::dr2:
      reg_force = dr2_force(phi);
      break;
  }
  ScalarField2D fid = fidelity_force(terms, phi, dirac);
  ScalarField2D u(phi.width, phi.height);
  for (std::size_t k = 0; k < u.v.size(); ++k)
    u.v[k] = -(reg.mu * reg_force.v[k] + fid.v[k]);
  return u;
}

} // namespace mbeseg
