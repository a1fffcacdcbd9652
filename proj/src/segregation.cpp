#include "surfpart/segregation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "surfpart/error.hpp"
#include "surfpart/kernels.hpp"
#include "surfpart/rng.hpp"

namespace surfpart {

namespace {

void require_closed(const TriangulatedSurface& mesh) {
  if (mesh.has_boundary() || !is_closed(mesh.geometry()))
    throw GeometryError("the segregation solver needs a closed surface mesh");
}

void require_mesh(const ComponentEnsemble& e, const TriangulatedSurface& mesh) {
  if (e.mesh != mesh.id()) throw MeshMismatchError("ensemble does not live on this mesh");
  for (const auto& c : e.components)
    if (c.size() != mesh.num_vertices()) throw DimensionError("component length differs from vertex count");
}

// Runs body(i) for every component on `workers` threads, rethrowing the
// first failure (lowest component index) afterwards.
template <class Body>
void for_components(std::size_t m, int workers, Body&& body) {
  std::vector<std::exception_ptr> errors(m);
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(m)));
#pragma omp parallel for schedule(static) num_threads(w)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double component_norm(const CsrMatrix& mass, std::span<const double> u, std::vector<double>& scratch) {
  scratch.resize(u.size());
  kernels::serial::spmv(mass, u, scratch);
  return std::sqrt(std::max(0.0, kernels::serial::dot(u, scratch)));
}

}  // namespace

std::vector<std::span<const double>> ComponentEnsemble::views() const {
  std::vector<std::span<const double>> v;
  v.reserve(components.size());
  for (const auto& c : components) v.emplace_back(c);
  return v;
}

std::vector<std::span<double>> ComponentEnsemble::views() {
  std::vector<std::span<double>> v;
  v.reserve(components.size());
  for (auto& c : components) v.emplace_back(c);
  return v;
}

InitResult random_init(const TriangulatedSurface& mesh, const CsrMatrix& mass, std::size_t m,
                       std::uint64_t seed, double epsilon, double tau) {
  require_closed(mesh);
  if (m < 2) throw ConfigError("need at least 2 components");
  if (m > kernels::kMaxComponents) throw ConfigError("at most 32 components are supported");
  if (m > mesh.num_vertices()) throw ConfigError("more components than vertices");
  if (!(epsilon > 0.0) || !(tau > 0.0)) throw DomainError("epsilon and tau must be positive");

  InitResult out;
  auto& e = out.ensemble;
  e.mesh = mesh.id();
  e.epsilon = epsilon;
  e.tau = tau;
  const std::size_t n = mesh.num_vertices();
  for (int attempt = 0;; ++attempt) {
    // Deterministic reseed rule: advance the seed by the golden-ratio increment.
    Rng rng(seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
    e.components.assign(m, std::vector<double>(n, 0.0));
    std::vector<std::size_t> support(m, 0);
    for (std::size_t z = 0; z < n; ++z) {
      const auto i = static_cast<std::size_t>(rng.uniform_index(m));
      e.components[i][z] = 1.0;
      ++support[i];
    }
    if (std::all_of(support.begin(), support.end(), [](std::size_t s) { return s > 0; })) break;
    ++out.reseeds;
    if (attempt > 1000) throw ConfigError("random initialisation could not populate every component");
  }
  normalize_step(e.components, mass);
  return out;
}

std::vector<std::vector<double>> heat_step(const ComponentEnsemble& ensemble, const FemOperators& ops,
                                           const StepOptions& options) {
  const CsrMatrix heat = ops.mass.combine(1.0 / ensemble.tau, ops.stiffness, 1.0);
  std::vector<std::vector<double>> out(ensemble.m());
  for_components(ensemble.m(), options.workers, [&](std::size_t i) {
    const auto& u = ensemble.components[i];
    std::vector<double> rhs(u.size());
    kernels::serial::spmv(ops.mass, u, rhs);
    for (double& r : rhs) r /= ensemble.tau;
    out[i] = u;
    PcgWorkspace work;
    PcgOptions pcg;
    pcg.rel_tol = options.solver_tol;
    pcg.max_iter = options.max_solver_iter;
    const auto rep = pcg_solve_into(heat, rhs, out[i], pcg, work);
    if (!rep.converged) throw SolverError("heat step: linear solve for component " + std::to_string(i) +
                                          " did not converge");
    if (options.clamp_negative)
      for (double& v : out[i]) v = std::max(v, 0.0);
  });
  return out;
}

void ode_step(std::vector<std::vector<double>>& fields, double epsilon, double tau, int workers) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  std::vector<std::span<double>> views(fields.begin(), fields.end());
  const double factor = 2.0 * tau / (epsilon * epsilon);
  if (workers <= 1)
    kernels::serial::ode_step(views, factor);
  else
    kernels::omp::ode_step(views, factor, workers);
}

void normalize_step(std::vector<std::vector<double>>& fields, const CsrMatrix& mass, int workers) {
  for_components(fields.size(), workers, [&](std::size_t i) {
    std::vector<double> scratch;
    const double nrm = component_norm(mass, fields[i], scratch);
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw ExtinctionError(i, "component " + std::to_string(i) + " has vanished (zero L2 norm)");
    for (double& v : fields[i]) v /= nrm;
  });
}

EnergyReport reported_energy(const ComponentEnsemble& ensemble, const TriangulatedSurface& mesh,
                             const FemOperators& ops) {
  require_mesh(ensemble, mesh);
  EnergyReport r;
  const std::size_t m = ensemble.m();
  r.lambda.resize(m);
  for (std::size_t i = 0; i < m; ++i) r.lambda[i] = quadratic_form(ops.stiffness, ensemble.components[i]);
  const auto cross = cross_integrals(mesh, ensemble.views());
  const double inv_eps2 = 1.0 / (ensemble.epsilon * ensemble.epsilon);
  double dirichlet = 0.0, s = 0.0;
  r.lambda_eps.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    dirichlet += r.lambda[i];
    s += cross[i];
    r.lambda_eps[i] = r.lambda[i] + 2.0 * inv_eps2 * cross[i];
  }
  r.s_eps = s * inv_eps2;
  r.energy = dirichlet + r.s_eps;
  r.energy_half = 0.5 * dirichlet + r.s_eps;
  return r;
}

double penalty_energy(const ComponentEnsemble& ensemble, const TriangulatedSurface& mesh) {
  require_mesh(ensemble, mesh);
  return penalty_energy(mesh, ensemble.views(), ensemble.epsilon);
}

Stepper::Stepper(const TriangulatedSurface& mesh, const FemOperators& ops, double tau,
                 const StepOptions& options)
    : mesh_(mesh),
      ops_(ops),
      heat_(ops.mass.combine(1.0 / tau, ops.stiffness, 1.0)),
      tau_(tau),
      options_(options) {
  require_closed(mesh);
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
}

void Stepper::step(ComponentEnsemble& e) {
  require_mesh(e, mesh_);
  if (e.tau != tau_) throw DomainError("stepper was built for a different time step");
  const std::size_t m = e.m();
  work_.resize(m);
  rhs_.resize(m);
  std::vector<int> iterations(m, 0);

  for_components(m, options_.workers, [&](std::size_t i) {
    auto& u = e.components[i];
    auto& rhs = rhs_[i];
    rhs.resize(u.size());
    kernels::serial::spmv(ops_.mass, u, rhs);
    for (double& r : rhs) r /= tau_;
    PcgOptions pcg;
    pcg.rel_tol = options_.solver_tol;
    pcg.max_iter = options_.max_solver_iter;
    // Warm start from the current component.
    const auto rep = pcg_solve_into(heat_, rhs, u, pcg, work_[i]);
    iterations[i] = rep.iterations;
    if (!rep.converged) {
      std::ostringstream os;
      os << "heat step: component " << i << " did not converge (" << rep.iterations
         << " iterations, residual " << rep.final_residual_norm << ")";
      throw SolverError(os.str());
    }
    if (options_.clamp_negative)
      for (double& v : u) v = std::max(v, 0.0);
  });
  last_iterations_ = *std::max_element(iterations.begin(), iterations.end());

  ode_step(e.components, e.epsilon, tau_, options_.workers);
  normalize_step(e.components, ops_.mass, options_.workers);
  ++e.step;
  e.time = static_cast<double>(e.step) * tau_;
}

std::int64_t check_interval(const StageParams& params, double tau) {
  if (params.check_interval > 0) return params.check_interval;
  return std::max<std::int64_t>(1, std::llround(params.check_time / tau));
}

StageResult run_stage(ComponentEnsemble ensemble, const TriangulatedSurface& mesh, const FemOperators& ops,
                      const StageParams& params, const StepOptions& options) {
  StageResult out;
  const std::int64_t interval = check_interval(params, ensemble.tau);
  try {
    Stepper stepper(mesh, ops, ensemble.tau, options);
    double previous = reported_energy(ensemble, mesh, ops).energy;
    out.trace.records.push_back({ensemble.step, ensemble.time, reported_energy(ensemble, mesh, ops)});
    std::int64_t taken = 0;
    while (taken < params.max_steps) {
      const std::int64_t burst = std::min(interval, params.max_steps - taken);
      for (std::int64_t k = 0; k < burst; ++k) stepper.step(ensemble);
      taken += burst;
      auto report = reported_energy(ensemble, mesh, ops);
      const double current = report.energy;
      out.trace.records.push_back({ensemble.step, ensemble.time, std::move(report)});
      if (!std::isfinite(current)) throw SolverError("energy became non-finite");
      if (std::abs(current - previous) < params.stop_tol) {
        out.converged = true;
        break;
      }
      previous = current;
    }
  } catch (const Error& err) {
    out.failure = err.what();
  }
  out.ensemble = std::move(ensemble);
  return out;
}

void ContinuationSchedule::validate() const {
  if (!(eps0 > 0.0) || !(tau0 > 0.0)) throw ConfigError("eps0 and tau0 must be positive");
  if (!(eps_factor > 0.0 && eps_factor < 1.0)) throw ConfigError("eps shrink factor must lie in (0, 1)");
  if (!(tau_factor > 0.0 && tau_factor <= 1.0)) throw ConfigError("tau shrink factor must lie in (0, 1]");
  if (levels < 0) throw ConfigError("levels must be non-negative");
  if (!(stage.stop_tol >= 0.0)) throw ConfigError("stop tolerance must be non-negative");
  if (stage.max_steps < 1) throw ConfigError("max steps must be positive");
}

ContinuationResult continue_from(const TriangulatedSurface& initial_mesh, ComponentEnsemble ensemble,
                                 const ContinuationSchedule& schedule, const StepOptions& options,
                                 const LevelCallback& on_level) {
  schedule.validate();
  ContinuationResult out;
  TriangulatedSurface mesh = initial_mesh;
  if (ensemble.mesh != initial_mesh.id()) throw MeshMismatchError("ensemble does not live on the initial mesh");
  ensemble.mesh = mesh.id();
  double eps = ensemble.epsilon;
  double tau = ensemble.tau;

  for (int level = 0; level <= schedule.levels; ++level) {
    const FemOperators ops = assemble_operators(mesh, Execution::parallel);
    ensemble.epsilon = eps;
    ensemble.tau = tau;
    ensemble.step = 0;
    ensemble.time = 0.0;
    StageResult stage = run_stage(std::move(ensemble), mesh, ops, schedule.stage, options);
    ensemble = std::move(stage.ensemble);

    LevelSummary summary;
    summary.level = level;
    summary.vertices = mesh.num_vertices();
    summary.h = mesh.h();
    summary.epsilon = eps;
    summary.tau = tau;
    summary.energy = stage.trace.records.back().report;
    summary.steps = ensemble.step;
    summary.time = ensemble.time;
    summary.converged = stage.converged;
    out.levels.push_back(summary);
    out.traces.push_back(std::move(stage.trace));
    if (on_level) on_level(LevelOutcome{out.levels.back(), mesh, ensemble, out.traces.back()});

    if (stage.failure) {
      out.failure = "level " + std::to_string(level) + ": " + *stage.failure;
      break;
    }
    if (level == schedule.levels) break;

    const std::size_t child_vertices = mesh.num_vertices() + 3 * mesh.num_triangles() / 2;
    if (schedule.max_vertices == 0 || child_vertices <= schedule.max_vertices) {
      auto refined = refine(mesh);
      for (auto& c : ensemble.components) c = prolong(NodalField{mesh.id(), c}, refined.map).values;
      mesh = std::move(refined.mesh);
      ensemble.mesh = mesh.id();
      tau *= schedule.tau_factor;
    }
    eps *= schedule.eps_factor;
    try {
      normalize_step(ensemble.components, assemble_mass(mesh, Execution::parallel), options.workers);
    } catch (const Error& err) {
      out.failure = "level " + std::to_string(level + 1) + ": " + err.what();
      break;
    }
  }
  out.ensemble = std::move(ensemble);
  out.mesh = std::move(mesh);
  return out;
}

ContinuationResult run_continuation(const TriangulatedSurface& initial_mesh, std::size_t m,
                                    const ContinuationSchedule& schedule, std::uint64_t seed,
                                    const StepOptions& options, const LevelCallback& on_level) {
  schedule.validate();
  const CsrMatrix mass = assemble_mass(initial_mesh, Execution::parallel);
  auto init = random_init(initial_mesh, mass, m, seed, schedule.eps0, schedule.tau0);
  auto result = continue_from(initial_mesh, std::move(init.ensemble), schedule, options, on_level);
  result.reseeds = init.reseeds;
  return result;
}

std::vector<double> eoc(std::span<const double> errors) {
  for (double e : errors)
    if (!(e > 0.0)) throw DomainError("eoc needs strictly positive errors");
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i)
    out.push_back(std::log(errors[i] / errors[i - 1]) / std::log(0.5));
  return out;
}

}  // namespace surfpart
