#include "mbeseg/solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <string>

namespace mbeseg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBlowup = 1e6;

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void check_model(const ModelSpec& m) {
  if (!(m.tau > 0.0) || !std::isfinite(m.tau))
    fail(ErrorKind::invalid_parameter, "model: tau must be positive and finite");
  if (m.iter_max < 1)
    fail(ErrorKind::invalid_parameter, "model: iter must be >= 1");
  if (m.tol < 0.0)
    fail(ErrorKind::invalid_parameter, "model: tol must be >= 0");
  if (!(m.c0 > 0.0))
    fail(ErrorKind::invalid_parameter, "model: c0 must be positive");
  if (!(m.dirac.epsilon > 0.0))
    fail(ErrorKind::invalid_parameter, "model: dirac epsilon must be positive");
}

} // namespace

// ---------- symbols ----------

SpectralSymbols build_symbols(int width, int height, double tau,
                              const RegularizerSpec& reg, Scheme scheme) {
  if (width < 4 || height < 4)
    fail(ErrorKind::invalid_grid, "build_symbols: grid must be at least 4x4");
  if (!(tau > 0.0) || !std::isfinite(tau))
    fail(ErrorKind::invalid_parameter, "build_symbols: tau must be positive");
  if (!(reg.mu > 0.0))
    fail(ErrorKind::invalid_parameter, "build_symbols: mu must be positive");
  const bool mbe = reg.kind == RegularizerSpec::Kind::mbe;
  if (mbe && !(reg.alpha > 0.0))
    fail(ErrorKind::invalid_parameter, "build_symbols: mbe needs alpha > 0");

  SpectralSymbols s;
  s.width = width;
  s.height = height;
  s.spec_width = width / 2 + 1;
  const std::size_t n = static_cast<std::size_t>(s.spec_width) * height;
  s.lap.resize(n);
  s.biharm.resize(n);
  s.a_inv.resize(n);

  for (int j = 0; j < height; ++j) {
    const double z2 = 2.0 * kPi * j / height;
    for (int i = 0; i < s.spec_width; ++i) {
      const double z1 = 2.0 * kPi * i / width;
      const double lam = 2.0 * std::cos(z1) - 2.0 + 2.0 * std::cos(z2) - 2.0;
      const std::size_t k = static_cast<std::size_t>(j) * s.spec_width + i;
      s.lap[k] = lam;
      s.biharm[k] = lam * lam;
      s.a_inv[k] = mbe ? 1.0 / (1.0 + tau * reg.mu * reg.alpha * lam * lam) : 1.0;
    }
  }

  if (scheme == Scheme::fdm) {
    if (mbe && !(tau * reg.mu < 3.0 * reg.alpha))
      fail(ErrorKind::scheme_instability,
           "fdm: requires tau*mu < 3*alpha (tau=" + std::to_string(tau) +
               ", mu=" + std::to_string(reg.mu) +
               ", alpha=" + std::to_string(reg.alpha) + ")");
    s.fdm_lhs_inv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lam = s.lap[k];
      const double q = mbe
                           ? 1.0 + tau * reg.mu * (0.75 * reg.alpha * lam * lam + lam)
                           : 1.0 - tau * reg.mu * lam;
      if (q <= 1e-12)
        fail(ErrorKind::scheme_instability,
             "fdm: implicit symbol " + std::to_string(q) +
                 " not positive (tau=" + std::to_string(tau) +
                 ", mu=" + std::to_string(reg.mu) +
                 ", alpha=" + std::to_string(reg.alpha) + ")");
      s.fdm_lhs_inv[k] = 1.0 / q;
    }
  }
  return s;
}

SpectralSymbols build_symbols(int width, int height, double tau, double mu,
                              double alpha, Scheme scheme) {
  RegularizerSpec reg;
  reg.kind = RegularizerSpec::Kind::mbe;
  reg.mu = mu;
  reg.alpha = alpha;
  return build_symbols(width, height, tau, reg, scheme);
}

// ---------- workspace ----------

struct SpectralWorkspace::Impl {
  int w = 0, h = 0, sw = 0;
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan fwd = nullptr, inv = nullptr;
};

SpectralWorkspace::SpectralWorkspace(int width, int height) : impl_(new Impl) {
  if (width < 4 || height < 4)
    fail(ErrorKind::invalid_grid, "SpectralWorkspace: grid must be at least 4x4");
  impl_->w = width;
  impl_->h = height;
  impl_->sw = width / 2 + 1;
  std::lock_guard<std::mutex> lock(fftw_mutex());
  impl_->real = fftw_alloc_real(static_cast<std::size_t>(width) * height);
  impl_->freq = fftw_alloc_complex(static_cast<std::size_t>(impl_->sw) * height);
  // FFTW_ESTIMATE keeps planning deterministic (no runtime measurement)
  impl_->fwd = fftw_plan_dft_r2c_2d(height, width, impl_->real, impl_->freq,
                                    FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_2d(height, width, impl_->freq, impl_->real,
                                    FFTW_ESTIMATE);
  if (!impl_->real || !impl_->freq || !impl_->fwd || !impl_->inv)
    fail(ErrorKind::invalid_grid, "SpectralWorkspace: FFTW setup failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(fftw_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
  if (impl_->real) fftw_free(impl_->real);
  if (impl_->freq) fftw_free(impl_->freq);
}

ScalarField2D SpectralWorkspace::apply_symbol(const ScalarField2D& in,
                                              const std::vector<double>& sym) {
  if (in.width != impl_->w || in.height != impl_->h)
    fail(ErrorKind::invalid_grid, "apply_symbol: field does not match workspace");
  const std::size_t ns = static_cast<std::size_t>(impl_->sw) * impl_->h;
  if (sym.size() != ns)
    fail(ErrorKind::invalid_parameter, "apply_symbol: symbol size mismatch");

  std::memcpy(impl_->real, in.v.data(), in.v.size() * sizeof(double));
  fftw_execute(impl_->fwd);
  for (std::size_t k = 0; k < ns; ++k) {
    impl_->freq[k][0] *= sym[k];
    impl_->freq[k][1] *= sym[k];
  }
  fftw_execute(impl_->inv);

  ScalarField2D out(impl_->w, impl_->h);
  const double scale = 1.0 / (static_cast<double>(impl_->w) * impl_->h);
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = impl_->real[k] * scale;
  return out;
}

ScalarField2D apply_A_inverse(const ScalarField2D& f, const SpectralSymbols& sym,
                              SpectralWorkspace& ws) {
  if (sym.a_inv.empty())
    fail(ErrorKind::invalid_parameter, "apply_A_inverse: symbols lack a_inv");
  return ws.apply_symbol(f, sym.a_inv);
}

// ---------- trace ----------

void EnergyTrace::write_csv(std::ostream& os) const {
  os << "iter,E_mod,E1,r,grad_max,grad_mean\n";
  char buf[192];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                  r.e_mod, r.e1, r.r, r.grad_max, r.grad_mean);
    os << buf;
  }
}

// ---------- evolver ----------

Evolver::Evolver(const ModelSpec& model, const ScalarField2D& image)
    : model_(model),
      terms_(make_fidelity_terms(model.fidelity, image)),
      sym_(build_symbols(image.width, image.height, model.tau, model.regularizer,
                         model.scheme)),
      ws_(image.width, image.height) {
  check_model(model);
}

LevelSetState Evolver::init_state(const InitSpec& init) {
  LevelSetState st;
  st.phi = init_level_set(terms_.image.width, terms_.image.height, init);
  refresh_fidelity(terms_, st.phi);
  last_e1_ = assemble_E1(st.phi, model_.regularizer, terms_, model_.dirac, model_.c0);
  st.r = std::sqrt(last_e1_);
  st.iter = 0;
  return st;
}

void Evolver::check_finite(const ScalarField2D& phi, int iter) const {
  for (double x : phi.v)
    if (!std::isfinite(x) || std::fabs(x) > kBlowup)
      fail(ErrorKind::divergence,
           "diverged at iteration " + std::to_string(iter) +
               ": |phi| exceeded " + std::to_string(kBlowup));
}

Evolver::StepInfo Evolver::sav_step(LevelSetState& state) {
  const ScalarField2D& phi = state.phi;
  const double tau = model_.tau;
  const bool mbe = model_.regularizer.kind == RegularizerSpec::Kind::mbe;

  refresh_fidelity(terms_, phi);
  const double e1 = assemble_E1(phi, model_.regularizer, terms_, model_.dirac,
                                model_.c0);
  last_e1_ = e1;
  ScalarField2D b = assemble_U(phi, model_.regularizer, terms_, model_.dirac);
  const double inv_sq = 1.0 / std::sqrt(e1);
  for (double& x : b.v) x *= inv_sq;

  const double bphi = field_inner(b, phi);
  ScalarField2D c(phi.width, phi.height);
  for (std::size_t k = 0; k < c.v.size(); ++k)
    c.v[k] = phi.v[k] - tau * state.r * b.v[k] + 0.5 * tau * bphi * b.v[k];

  // A = I for the DR baselines (L = 0), so the solves collapse to copies
  ScalarField2D ac = mbe ? apply_A_inverse(c, sym_, ws_) : c;
  ScalarField2D ab = mbe ? apply_A_inverse(b, sym_, ws_) : b;

  const double denom = 1.0 + 0.5 * tau * field_inner(b, ab);
  const double d = field_inner(b, ac) / denom;

  ScalarField2D phi_new(phi.width, phi.height);
  for (std::size_t k = 0; k < phi_new.v.size(); ++k)
    phi_new.v[k] = ac.v[k] - 0.5 * tau * d * ab.v[k];
  check_finite(phi_new, state.iter + 1);

  double r_inc = 0.0, delta_max = 0.0;
  for (std::size_t k = 0; k < phi_new.v.size(); ++k) {
    const double dphi = phi_new.v[k] - phi.v[k];
    r_inc += b.v[k] * dphi;
    delta_max = std::max(delta_max, std::fabs(dphi));
  }

  state.phi = std::move(phi_new);
  state.r += 0.5 * r_inc;
  state.iter += 1;
  return {e1, delta_max};
}

Evolver::StepInfo Evolver::fdm_step(LevelSetState& state) {
  const ScalarField2D& phi = state.phi;
  const double tau = model_.tau;
  const double mu = model_.regularizer.mu;
  const bool mbe = model_.regularizer.kind == RegularizerSpec::Kind::mbe;
  if (sym_.fdm_lhs_inv.empty())
    fail(ErrorKind::invalid_parameter, "fdm_step: model was built for sav");

  refresh_fidelity(terms_, phi);
  const double e1 = assemble_E1(phi, model_.regularizer, terms_, model_.dirac,
                                model_.c0);
  last_e1_ = e1;
  ScalarField2D fid = fidelity_force(terms_, phi, model_.dirac);

  ScalarField2D rhs(phi.width, phi.height);
  if (mbe) {
    // explicit: mu(-alpha/4 lap^2 phi + div(|grad phi|^2 grad phi)) + T_seg
    const double alpha = model_.regularizer.alpha;
    ScalarField2D bi = biharmonic(phi);
    VectorField2D g = gradient_central(phi);
    VectorField2D flux(phi.width, phi.height);
    for (std::size_t k = 0; k < g.x.v.size(); ++k) {
      const double s2 = g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k];
      flux.x.v[k] = s2 * g.x.v[k];
      flux.y.v[k] = s2 * g.y.v[k];
    }
    ScalarField2D dv = divergence_central(flux);
    for (std::size_t k = 0; k < rhs.v.size(); ++k)
      rhs.v[k] = phi.v[k] +
                 tau * (mu * (-0.25 * alpha * bi.v[k] + dv.v[k]) + fid.v[k]);
  } else {
    // explicit: mu(div(d(s) grad phi) - lap phi) + T_seg; lap implicit
    ScalarField2D diff = model_.regularizer.kind == RegularizerSpec::Kind::dr1
                             ? dr1_force(phi)
                             : dr2_force(phi);
    ScalarField2D lp = laplacian(phi);
    for (std::size_t k = 0; k < rhs.v.size(); ++k)
      rhs.v[k] = phi.v[k] + tau * (mu * (diff.v[k] - lp.v[k]) + fid.v[k]);
  }

  ScalarField2D phi_new = ws_.apply_symbol(rhs, sym_.fdm_lhs_inv);
  check_finite(phi_new, state.iter + 1);

  double delta_max = 0.0;
  for (std::size_t k = 0; k < phi_new.v.size(); ++k)
    delta_max = std::max(delta_max, std::fabs(phi_new.v[k] - phi.v[k]));

  state.phi = std::move(phi_new);
  state.iter += 1;
  return {e1, delta_max};
}

Evolver::StepInfo Evolver::step(LevelSetState& state) {
  return model_.scheme == Scheme::sav ? sav_step(state) : fdm_step(state);
}

double Evolver::modified_energy(const LevelSetState& state) const {
  double quad = 0.0;
  if (model_.regularizer.kind == RegularizerSpec::Kind::mbe) {
    ScalarField2D bi = biharmonic(state.phi);
    quad = 0.5 * model_.regularizer.mu * model_.regularizer.alpha *
           field_inner(state.phi, bi);
  }
  return quad + state.r * state.r;
}

double Evolver::aux_energy(const ScalarField2D& phi) {
  refresh_fidelity(terms_, phi);
  last_e1_ = assemble_E1(phi, model_.regularizer, terms_, model_.dirac, model_.c0);
  return last_e1_;
}

// ---------- full pipeline ----------

namespace {

TraceRow start_row(const Evolver& ev, const LevelSetState& st) {
  TraceRow row;
  row.iter = st.iter;
  row.e_mod = ev.modified_energy(st);
  row.e1 = 0.0; // filled when E1(phi) at this state becomes available
  row.r = st.r;
  ScalarField2D mag = gradient_magnitude(st.phi, 0.0);
  row.grad_max = 0.0;
  double sum = 0.0;
  for (double m : mag.v) {
    row.grad_max = std::max(row.grad_max, m);
    sum += m;
  }
  row.grad_mean = sum / static_cast<double>(mag.v.size());
  return row;
}

} // namespace

SegmentationResult run(const ModelSpec& model, const ScalarField2D& image,
                       const InitSpec& init, bool quiet) {
  Evolver ev(model, image);
  SegmentationResult res;
  LevelSetState state = ev.init_state(init);

  TraceRow pending = start_row(ev, state);
  res.status = RunStatus::completed;

  const int report = std::max(1, model.iter_max / 10);
  for (int n = 1; n <= model.iter_max; ++n) {
    Evolver::StepInfo info;
    try {
      info = ev.step(state);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::divergence) throw;
      // terms were refreshed at the last good phi before the step failed
      pending.e1 = ev.last_e1();
      res.trace.rows.push_back(pending);
      res.status = RunStatus::diverged;
      res.message = e.what();
      break;
    }
    pending.e1 = info.e1;
    res.trace.rows.push_back(pending);
    pending = start_row(ev, state);

    if (!quiet && (n % report == 0 || n == model.iter_max))
      std::fprintf(stderr, "iter %6d  E_mod %.8g\n", n, pending.e_mod);

    if (model.tol > 0.0 &&
        info.delta_max <= model.tol * std::max(1.0, field_max_abs(state.phi))) {
      res.status = RunStatus::tol_reached;
      break;
    }
  }

  if (res.status != RunStatus::diverged) {
    pending.e1 = ev.aux_energy(state.phi);
    res.trace.rows.push_back(pending);
  }

  res.mask = region_masks(state.phi).first;
  res.contours = extract_zero_contour(state.phi);
  res.grad_map = gradient_magnitude(state.phi, 0.0);
  res.state = std::move(state);
  return res;
}

} // namespace mbeseg
