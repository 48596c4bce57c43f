#pragma once

#include <initializer_list>
#include <string>

#include "json.hpp"

#include "finsler/geodesics.hpp"
#include "finsler/hypersurface.hpp"
#include "finsler/metric.hpp"
#include "finsler/reference_example.hpp"
#include "finsler/spray.hpp"

namespace finsler {

using ojson = nlohmann::ordered_json;

// Strict-schema helpers shared by every config consumer: unknown keys and
// wrong shapes raise ConfigInvalid rather than being ignored.
void require_keys(const ojson& j, std::initializer_list<const char*> allowed,
                  const char* where);
const ojson& require_key(const ojson& j, const char* key, const char* where);
double json_number(const ojson& j, const char* what);
int json_int(const ojson& j, const char* what);

// Parsers reject unknown keys (ConfigInvalid) so configs cannot silently
// misspell an option. Numbers are accepted wherever an expression is
// expected and read as constants.
ScalarField parse_expr(const ojson& j);
MetricSpec parse_metric(const ojson& j);
HypersurfaceSpec parse_hypersurface(const ojson& j);
Box parse_box(const ojson& j, int dim);

ojson expr_to_json(const ScalarField& f);
ojson metric_to_json(const MetricSpec& m);
ojson hypersurface_to_json(const HypersurfaceSpec& hyp);

ojson vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd parse_vector(const ojson& j, int dim, const char* what);

ojson curvature_to_json(const CurvatureReport& report);
ojson shape_to_json(const ShapeReport& report);
ojson flow_to_json(const ParallelFlowReport& report);
ojson surface_verdict_to_json(const SurfaceVerdict& verdict);
ojson function_verdict_to_json(const IsoparametricVerdict& verdict);
ojson claims_to_json(const ClaimReport& report);

// Deterministic dump: fixed key order (insertion order of ordered_json),
// floats rendered as %.12e, two-space indentation.
std::string dump_fixed(const ojson& j);

// CSV emitters for time/grid series.
std::string trajectory_csv(const GeodesicTrajectory& traj);
std::string flow_csv(const ParallelFlowReport& report);

}  // namespace finsler
