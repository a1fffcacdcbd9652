#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfpart/fem.hpp"
#include "surfpart/mesh.hpp"
#include "surfpart/solve.hpp"

namespace surfpart {

// The m nonnegative nodal fields u_1..u_m with their penalty and time step.
struct ComponentEnsemble {
  MeshId mesh = 0;
  std::vector<std::vector<double>> components;
  double epsilon = 0.5;
  double tau = 8e-4;
  std::int64_t step = 0;
  double time = 0.0;

  std::size_t m() const { return components.size(); }
  std::size_t n() const { return components.empty() ? 0 : components.front().size(); }
  std::vector<std::span<const double>> views() const;
  std::vector<std::span<double>> views();
  NodalField field(std::size_t i) const { return {mesh, components[i]}; }
};

struct EnergyReport {
  double energy = 0.0;       // sum_i |u_i|_{H1}^2 + S_eps
  double energy_half = 0.0;  // (1/2) sum_i |u_i|_{H1}^2 + S_eps
  double s_eps = 0.0;
  std::vector<double> lambda;      // |u_i|_{H1}^2
  std::vector<double> lambda_eps;  // lambda_i + (2/eps^2) int (sum_{j!=i} u_j^2) u_i^2
};

struct EnergyRecord {
  std::int64_t step = 0;
  double time = 0.0;
  EnergyReport report;
};

struct EnergyTrace {
  std::vector<EnergyRecord> records;
};

struct StepOptions {
  int workers = 1;  // threads sharing the components in contiguous blocks
  double solver_tol = 1e-10;
  int max_solver_iter = 20000;
  bool clamp_negative = true;
};

struct InitResult {
  ComponentEnsemble ensemble;
  int reseeds = 0;
};

// Each vertex gets exactly one component equal to 1 (chosen uniformly),
// then every component is normalised in L2.
InitResult random_init(const TriangulatedSurface& mesh, const CsrMatrix& mass, std::size_t m,
                       std::uint64_t seed, double epsilon, double tau);

// Step 1: (M/tau + A) u~_i = (1/tau) M u_i for every component.
std::vector<std::vector<double>> heat_step(const ComponentEnsemble& ensemble, const FemOperators& ops,
                                           const StepOptions& options = {});
// Step 2: exact nodal solution of the penalty ODE with Jacobi coupling.
void ode_step(std::vector<std::vector<double>>& fields, double epsilon, double tau, int workers = 1);
// Step 3: rescale every component to unit L2 norm. Throws ExtinctionError.
void normalize_step(std::vector<std::vector<double>>& fields, const CsrMatrix& mass, int workers = 1);

EnergyReport reported_energy(const ComponentEnsemble& ensemble, const TriangulatedSurface& mesh,
                             const FemOperators& ops);
double penalty_energy(const ComponentEnsemble& ensemble, const TriangulatedSurface& mesh);

// Runs full splitting steps on one mesh with fixed eps and tau.
class Stepper {
 public:
  Stepper(const TriangulatedSurface& mesh, const FemOperators& ops, double tau, const StepOptions& options);

  // One heat / ODE / normalise step, in place.
  void step(ComponentEnsemble& ensemble);
  int last_max_iterations() const { return last_iterations_; }

 private:
  const TriangulatedSurface& mesh_;
  const FemOperators& ops_;
  CsrMatrix heat_;
  double tau_;
  StepOptions options_;
  std::vector<PcgWorkspace> work_;
  std::vector<std::vector<double>> rhs_;
  int last_iterations_ = 0;
};

struct StageParams {
  double stop_tol = 1e-6;       // absolute change of the reported energy
  double check_time = 0.1;      // M_tau * tau
  std::int64_t check_interval = 0;  // 0: round(check_time / tau)
  std::int64_t max_steps = 2'000'000;
};

std::int64_t check_interval(const StageParams& params, double tau);

struct StageResult {
  ComponentEnsemble ensemble;
  EnergyTrace trace;
  bool converged = false;
  std::optional<std::string> failure;
};

StageResult run_stage(ComponentEnsemble ensemble, const TriangulatedSurface& mesh, const FemOperators& ops,
                      const StageParams& params, const StepOptions& options = {});

struct ContinuationSchedule {
  double eps0 = 0.5;
  double tau0 = 8e-4;
  double eps_factor = 1.0 / std::numbers::sqrt2;  // eps_{l+1} = eps_factor * eps_l
  double tau_factor = 1.0 / std::numbers::sqrt2;  // applied on each refinement
  int levels = 0;                                 // stages 0..levels
  std::size_t max_vertices = 0;                   // refine only while the child fits; 0 = always
  StageParams stage;

  void validate() const;
};

struct LevelSummary {
  int level = 0;
  std::size_t vertices = 0;
  double h = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  EnergyReport energy;
  std::int64_t steps = 0;
  double time = 0.0;
  bool converged = false;
};

struct LevelOutcome {
  const LevelSummary& summary;
  const TriangulatedSurface& mesh;
  const ComponentEnsemble& ensemble;
  const EnergyTrace& trace;
};

struct ContinuationResult {
  std::vector<LevelSummary> levels;
  std::vector<EnergyTrace> traces;
  std::optional<TriangulatedSurface> mesh;
  ComponentEnsemble ensemble;
  int reseeds = 0;
  std::optional<std::string> failure;
};

using LevelCallback = std::function<void(const LevelOutcome&)>;

ContinuationResult run_continuation(const TriangulatedSurface& initial_mesh, std::size_t m,
                                    const ContinuationSchedule& schedule, std::uint64_t seed,
                                    const StepOptions& options = {}, const LevelCallback& on_level = {});

// Continue from a given ensemble (restart); schedule.eps0/tau0 are ignored
// in favour of the ensemble's own values.
ContinuationResult continue_from(const TriangulatedSurface& mesh, ComponentEnsemble ensemble,
                                 const ContinuationSchedule& schedule, const StepOptions& options = {},
                                 const LevelCallback& on_level = {});

// eoc_i = log(e_i / e_{i-1}) / log(1/2).
std::vector<double> eoc(std::span<const double> errors);

}  // namespace surfpart
