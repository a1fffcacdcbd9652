#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "surfpart/analysis.hpp"
#include "surfpart/config.hpp"
#include "surfpart/segregation.hpp"

namespace surfpart {

// Each command validates the configuration, writes its files below
// config.out (skipped when out is "-") and prints a report to `log`.

struct MeshOutput {
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  double h = 0.0;
};
MeshOutput cmd_mesh(const RunConfig& config, std::ostream& log);

struct PartitionReport {
  int euler_characteristic = 0;
  PartitionExtraction extraction;
  DualGraphReport dual;
  std::vector<ClassStats> classes;
  CurvatureSamples curvature;
};

PartitionReport analyze_ensemble(const TriangulatedSurface& mesh, const ComponentEnsemble& ensemble,
                                 const CsrMatrix& stiffness);

struct SolveOutput {
  ContinuationResult result;
  PartitionReport partition;
};
SolveOutput cmd_solve(const RunConfig& config, std::ostream& log);

struct EpsRow {
  double epsilon = 0.0;
  std::size_t vertices = 0;
  double energy = 0.0;
  double error = 0.0;       // |45/4 - energy|
  double eoc_energy = 0.0;  // NaN in the first row
  double s_eps = 0.0;
  double eoc_s = 0.0;
  std::vector<double> lambda;
  std::vector<double> lambda_eps;
};
struct EpsStudy {
  std::vector<EpsRow> rows;
  ContinuationResult result;
};
// m = 3 on the sphere against the Y-partition energy.
EpsStudy cmd_study_eps(const RunConfig& config, std::ostream& log);

struct HRow {
  std::size_t vertices = 0;
  double h = 0.0;
  double energy = 0.0;
  double s_eps = 0.0;
  double difference = 0.0;  // |E_l - E_{l-1}|, NaN in the first row
  double eoc = 0.0;
};
// Fixed epsilon = eps0, the mesh refined `levels` times.
std::vector<HRow> cmd_study_h(const RunConfig& config, std::ostream& log);

struct OracleRow {
  int level = 0;
  std::size_t vertices = 0;
  double h = 0.0;
  double lambda = 0.0;
  double error = 0.0;
  double eoc = 0.0;
};
struct OracleOutput {
  std::vector<OracleRow> rows;
  double reference = 0.0;     // exact first eigenvalue
  double extrapolated = 0.0;  // Richardson, second order
  double copies = 1.0;        // sectors tiling the disk
};
// First Dirichlet eigenvalue of the disk or sector from config.level to
// config.level + config.levels.
OracleOutput cmd_oracle(const RunConfig& config, std::ostream& log);

PartitionReport cmd_analyze(const std::string& snapshot, const RunConfig& config, std::ostream& log);

}  // namespace surfpart
