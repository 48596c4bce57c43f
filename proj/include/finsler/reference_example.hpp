#pragma once

#include <string>
#include <vector>

#include "finsler/hypersurface.hpp"
#include "finsler/metric.hpp"
#include "finsler/randers.hpp"

namespace finsler {

// The repository's reference construction: a conformally flat scaling of the
// constant-wind Randers metric, with the hyperplane x^n = x0n as the
// distinguished hypersurface. Its shape operator vanishes identically while
// the parallel hypersurfaces fail to have constant mean curvature.
struct ReferenceInstance {
  int n = 3;
  double b = 0.5;
  double x0n = 0.0;
  MetricSpec metric;     // e^rho * navigate(Euclidean, b d/dx^n)
  ScalarField rho;       // sum_{a<n} ln(2 + cos(pi x^a))
  HypersurfaceSpec plane;
};

ReferenceInstance build_reference_metric(int n = 3, double b = 0.5, double x0n = 0.0);

// Lattice points of the plane: integer first coordinates, last = x0n.
Eigen::VectorXd lattice_point(const ReferenceInstance& inst, const std::vector<int>& m_coords);
Eigen::VectorXd reference_u1(const ReferenceInstance& inst);  // all-even lattice point
Eigen::VectorXd reference_u2(const ReferenceInstance& inst);  // all-odd lattice point

struct Claim {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct ClaimReport {
  std::vector<Claim> claims;
  bool overall = false;
};

// One-shot verification of the quantitative claims about the instance:
// lattice geodesics, vanishing shape operator, the two Ricci endpoints,
// S(normal) = 0, non-constant parallel mean curvature, and the negative
// isoparametric verdict. Claims never abort the run; failures are recorded.
ClaimReport verify_reference_claims(const ReferenceInstance& inst);

}  // namespace finsler
