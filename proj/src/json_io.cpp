#include "finsler/json_io.hpp"

#include "finsler/randers.hpp"

#include <cstdio>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace finsler {
namespace {

[[noreturn]] void bad_config(const std::string& what, const std::string& context = {}) {
  throw FinslerError(ErrorCode::config_invalid, what, context);
}

}  // namespace

void require_keys(const ojson& j, std::initializer_list<const char*> allowed,
                  const char* where) {
  if (!j.is_object()) bad_config(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) bad_config("unknown key '" + item.key() + "'", where);
  }
}

const ojson& require_key(const ojson& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) bad_config(std::string("missing key '") + key + "'", where);
  return *it;
}

double json_number(const ojson& j, const char* what) {
  if (!j.is_number()) bad_config(std::string(what) + " must be a number");
  return j.get<double>();
}

int json_int(const ojson& j, const char* what) {
  if (!j.is_number_integer()) bad_config(std::string(what) + " must be an integer");
  return j.get<int>();
}

namespace {

std::vector<ScalarField> parse_expr_array(const ojson& j, const char* what) {
  if (!j.is_array() || j.empty())
    bad_config(std::string(what) + " must be a non-empty array of expressions");
  std::vector<ScalarField> out;
  for (const auto& e : j) out.push_back(parse_expr(e));
  return out;
}

}  // namespace

ScalarField parse_expr(const ojson& j) {
  if (j.is_number()) return ScalarField::constant(j.get<double>());
  if (!j.is_object() || j.size() != 1)
    bad_config("expression must be a number or a single-key object");
  const std::string& op = j.items().begin().key();
  const ojson& arg = j.items().begin().value();

  if (op == "const") return ScalarField::constant(json_number(arg, "const"));
  if (op == "coord") {
    int idx = json_int(arg, "coord");
    if (idx < 0) bad_config("coord index must be nonnegative");
    return ScalarField::coordinate(idx);
  }
  if (op == "sum") return ScalarField::sum(parse_expr_array(arg, "sum"));
  if (op == "product") return ScalarField::product(parse_expr_array(arg, "product"));
  if (op == "sin") return ScalarField::sin(parse_expr(arg));
  if (op == "cos") return ScalarField::cos(parse_expr(arg));
  if (op == "exp") return ScalarField::exp(parse_expr(arg));
  if (op == "log") return ScalarField::log(parse_expr(arg));
  if (op == "pow") {
    require_keys(arg, {"base", "exponent"}, "pow");
    return ScalarField::pow(parse_expr(require_key(arg, "base", "pow")),
                            json_number(require_key(arg, "exponent", "pow"), "exponent"));
  }
  bad_config("unknown expression operator '" + op + "'");
}

namespace {

ojson node_to_json(const ScalarField::Node& n) {
  using Op = ScalarField::Op;
  ojson j;
  switch (n.op) {
    case Op::constant:
      j["const"] = n.num;
      break;
    case Op::coord:
      j["coord"] = n.index;
      break;
    case Op::add:
    case Op::mul: {
      ojson kids = ojson::array();
      for (const auto& k : n.kids) kids.push_back(node_to_json(*k));
      j[n.op == Op::add ? "sum" : "product"] = std::move(kids);
      break;
    }
    case Op::sin_:
      j["sin"] = node_to_json(*n.kids[0]);
      break;
    case Op::cos_:
      j["cos"] = node_to_json(*n.kids[0]);
      break;
    case Op::exp_:
      j["exp"] = node_to_json(*n.kids[0]);
      break;
    case Op::log_:
      j["log"] = node_to_json(*n.kids[0]);
      break;
    case Op::pow_:
      j["pow"] = ojson{{"base", node_to_json(*n.kids[0])}, {"exponent", n.num}};
      break;
  }
  return j;
}

}  // namespace

ojson expr_to_json(const ScalarField& f) { return node_to_json(f.root()); }

MetricSpec parse_metric(const ojson& j) {
  if (!j.is_object()) bad_config("metric must be a JSON object");
  const ojson& type_j = require_key(j, "type", "metric");
  if (!type_j.is_string()) bad_config("metric type must be a string");
  std::string type = type_j.get<std::string>();

  if (type == "euclidean") {
    require_keys(j, {"type", "dim"}, "metric");
    return euclidean_metric(json_int(require_key(j, "dim", "metric"), "dim"));
  }
  if (type == "randers") {
    require_keys(j, {"type", "h", "wind"}, "metric");
    const ojson& hj = require_key(j, "h", "metric");
    require_keys(hj, {"dim", "entries"}, "metric.h");
    int dim = json_int(require_key(hj, "dim", "metric.h"), "dim");
    RiemannianSpec h;
    h.dim = dim;
    if (auto it = hj.find("entries"); it != hj.end()) {
      if (!it->is_array() || static_cast<int>(it->size()) != dim)
        bad_config("metric.h.entries must be an array of dim rows");
      for (const auto& row : *it) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
          bad_config("each metric.h.entries row needs dim expressions");
        for (const auto& e : row) h.entries.push_back(parse_expr(e));
      }
    }
    const ojson& wj = require_key(j, "wind", "metric");
    if (!wj.is_array() || static_cast<int>(wj.size()) != dim)
      bad_config("wind must be an array of dim expressions");
    VectorField wind;
    for (const auto& e : wj) wind.comps.push_back(parse_expr(e));
    return navigate(std::move(h), std::move(wind));
  }
  if (type == "conformal") {
    require_keys(j, {"type", "rho", "inner"}, "metric");
    return conformal_scale(parse_metric(require_key(j, "inner", "metric")),
                           parse_expr(require_key(j, "rho", "metric")));
  }
  if (type == "paper") {
    require_keys(j, {"type", "dim", "b"}, "metric");
    return build_reference_metric(json_int(require_key(j, "dim", "metric"), "dim"),
                                  json_number(require_key(j, "b", "metric"), "b"))
        .metric;
  }
  bad_config("unknown metric type '" + type + "'");
}

ojson metric_to_json(const MetricSpec& m) {
  if (const EuclideanBase* e = m.as_euclidean())
    return ojson{{"type", "euclidean"}, {"dim", e->dim}};
  if (const RandersNavigation* r = m.as_randers()) {
    ojson hj{{"dim", r->h.dim}};
    if (!r->h.entries.empty()) {
      ojson rows = ojson::array();
      for (int i = 0; i < r->h.dim; ++i) {
        ojson row = ojson::array();
        for (int k = 0; k < r->h.dim; ++k)
          row.push_back(expr_to_json(r->h.entries[static_cast<size_t>(i) * r->h.dim + k]));
        rows.push_back(std::move(row));
      }
      hj["entries"] = std::move(rows);
    }
    ojson wind = ojson::array();
    for (const auto& c : r->wind.comps) wind.push_back(expr_to_json(c));
    return ojson{{"type", "randers"}, {"h", std::move(hj)}, {"wind", std::move(wind)}};
  }
  const ConformalScale& c = *m.as_conformal();
  return ojson{{"type", "conformal"},
               {"rho", expr_to_json(c.rho)},
               {"inner", metric_to_json(*c.inner)}};
}

HypersurfaceSpec parse_hypersurface(const ojson& j) {
  if (!j.is_object()) bad_config("hypersurface must be a JSON object");
  const ojson& kind_j = require_key(j, "kind", "hypersurface");
  if (!kind_j.is_string()) bad_config("hypersurface kind must be a string");
  std::string kind = kind_j.get<std::string>();

  Orientation orient = Orientation::auto_positive_last;
  if (auto it = j.find("orientation"); it != j.end()) {
    if (!it->is_string()) bad_config("orientation must be a string");
    std::string o = it->get<std::string>();
    if (o == "auto_positive_last")
      orient = Orientation::auto_positive_last;
    else if (o == "gradient")
      orient = Orientation::gradient;
    else if (o == "anti_gradient")
      orient = Orientation::anti_gradient;
    else
      bad_config("unknown orientation '" + o + "'");
  }

  if (kind == "level_set") {
    require_keys(j, {"kind", "f", "value", "orientation"}, "hypersurface");
    double value = 0.0;
    if (auto it = j.find("value"); it != j.end()) value = json_number(*it, "value");
    return HypersurfaceSpec::level_set(parse_expr(require_key(j, "f", "hypersurface")), value,
                                       orient);
  }
  if (kind == "graph") {
    require_keys(j, {"kind", "height", "orientation"}, "hypersurface");
    return HypersurfaceSpec::graph(parse_expr(require_key(j, "height", "hypersurface")), orient);
  }
  bad_config("unknown hypersurface kind '" + kind + "'");
}

ojson hypersurface_to_json(const HypersurfaceSpec& hyp) {
  const char* orient = hyp.orientation == Orientation::gradient        ? "gradient"
                       : hyp.orientation == Orientation::anti_gradient ? "anti_gradient"
                                                                       : "auto_positive_last";
  if (hyp.kind == HypersurfaceSpec::Kind::level_set)
    return ojson{{"kind", "level_set"},
                 {"f", expr_to_json(hyp.f)},
                 {"value", hyp.value},
                 {"orientation", orient}};
  return ojson{{"kind", "graph"}, {"height", expr_to_json(hyp.f)}, {"orientation", orient}};
}

Box parse_box(const ojson& j, int dim) {
  require_keys(j, {"lo", "hi"}, "region");
  Box box;
  box.lo = parse_vector(require_key(j, "lo", "region"), dim, "region.lo");
  box.hi = parse_vector(require_key(j, "hi", "region"), dim, "region.hi");
  return box;
}

ojson vector_to_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd parse_vector(const ojson& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    bad_config(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = json_number(j[i], what);
  return v;
}

namespace {

ojson matrix_rows(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ojson curvature_to_json(const CurvatureReport& report) {
  ojson flags = ojson::array();
  for (const FlagValue& f : report.flags)
    flags.push_back(ojson{{"u", vector_to_json(f.u)}, {"K", f.K}});
  return ojson{{"ric", report.ric},
               {"S", report.S},
               {"flag", std::move(flags)},
               {"R", matrix_rows(report.R)}};
}

ojson shape_to_json(const ShapeReport& report) {
  ojson frame = ojson::array();
  for (const auto& e : report.tangent_frame) frame.push_back(vector_to_json(e));
  return ojson{{"normal", vector_to_json(report.normal)},
               {"tangent_frame", std::move(frame)},
               {"A", matrix_rows(report.A)},
               {"principal", vector_to_json(report.principal)},
               {"H_aniso", report.H_aniso},
               {"S_normal", report.S_normal},
               {"H_mu", report.H_mu},
               {"symmetry_defect", report.symmetry_defect}};
}

ojson flow_to_json(const ParallelFlowReport& report) {
  ojson rows = ojson::array();
  for (size_t ti = 0; ti < report.rows.size(); ++ti) {
    ojson row = ojson::array();
    for (size_t s = 0; s < report.rows[ti].size(); ++s) {
      const ShapeReport& r = report.rows[ti][s];
      row.push_back(ojson{{"x", vector_to_json(report.points[ti][s])},
                          {"principal", vector_to_json(r.principal)},
                          {"H_aniso", r.H_aniso},
                          {"S_normal", r.S_normal},
                          {"H_mu", r.H_mu}});
    }
    rows.push_back(std::move(row));
  }
  ojson checks = ojson::array();
  for (const TraceCheck& c : report.trace_checks)
    checks.push_back(ojson{{"seed_id", c.seed_id},
                           {"fd", c.fd},
                           {"predicted", c.predicted},
                           {"rel_err", c.rel_err}});
  ojson grid = ojson::array();
  for (double t : report.t_grid) grid.push_back(t);
  ojson sa = ojson::array(), sm = ojson::array();
  for (double v : report.spread_H_aniso) sa.push_back(v);
  for (double v : report.spread_H_mu) sm.push_back(v);
  return ojson{{"t_grid", std::move(grid)},
               {"fd_step", report.fd_step},
               {"spread_H_aniso", std::move(sa)},
               {"spread_H_mu", std::move(sm)},
               {"trace_checks", std::move(checks)},
               {"rows", std::move(rows)}};
}

ojson surface_verdict_to_json(const SurfaceVerdict& verdict) {
  return ojson{{"is_isoparametric", verdict.is_isoparametric},
               {"is_dmu_isoparametric", verdict.is_dmu_isoparametric},
               {"max_spread_H_aniso", verdict.max_spread_H_aniso},
               {"max_spread_H_mu", verdict.max_spread_H_mu},
               {"evidence", flow_to_json(verdict.evidence)}};
}

ojson function_verdict_to_json(const IsoparametricVerdict& verdict) {
  ojson levels = ojson::array();
  for (size_t i = 0; i < verdict.level_t.size(); ++i)
    levels.push_back(ojson{{"t", verdict.level_t[i]},
                           {"a", verdict.a_table[i]},
                           {"b", verdict.b_table[i]}});
  return ojson{{"is_transnormal", verdict.is_transnormal},
               {"is_isoparametric", verdict.is_isoparametric},
               {"transnormal_spread", verdict.transnormal_spread},
               {"laplacian_spread", verdict.laplacian_spread},
               {"buckets_used", verdict.buckets_used},
               {"samples_used", verdict.samples_used},
               {"levels", std::move(levels)}};
}

ojson claims_to_json(const ClaimReport& report) {
  ojson claims = ojson::array();
  for (const Claim& c : report.claims)
    claims.push_back(ojson{{"name", c.name},
                           {"expected", c.expected},
                           {"computed", c.computed},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"note", c.note}});
  return ojson{{"overall", report.overall}, {"claims", std::move(claims)}};
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

bool all_primitive(const ojson& j) {
  for (const auto& e : j)
    if (e.is_object() || e.is_array()) return false;
  return true;
}

void dump_rec(const ojson& j, std::string& out, int indent) {
  const std::string pad(indent, ' ');
  const std::string pad_in(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    size_t i = 0;
    for (const auto& item : j.items()) {
      out += pad_in + ojson(item.key()).dump() + ": ";
      dump_rec(item.value(), out, indent + 2);
      if (++i < j.size()) out += ",";
      out += "\n";
    }
    out += pad + "}";
    return;
  }
  if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    if (all_primitive(j)) {
      out += "[";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        dump_rec(j[i], out, indent);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (size_t i = 0; i < j.size(); ++i) {
      out += pad_in;
      dump_rec(j[i], out, indent + 2);
      if (i + 1 < j.size()) out += ",";
      out += "\n";
    }
    out += pad + "]";
    return;
  }
  if (j.is_number_float()) {
    out += format_double(j.get<double>());
    return;
  }
  out += j.dump();  // ints, bools, strings, null
}

}  // namespace

std::string dump_fixed(const ojson& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

std::string trajectory_csv(const GeodesicTrajectory& traj) {
  const int n = static_cast<int>(traj.x_samples.front().size());
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= n; ++i) out += ",v" + std::to_string(i);
  out += ",F\n";
  for (size_t s = 0; s < traj.t_samples.size(); ++s) {
    out += format_double(traj.t_samples[s]);
    for (int i = 0; i < n; ++i) out += "," + format_double(traj.x_samples[s][i]);
    for (int i = 0; i < n; ++i) out += "," + format_double(traj.v_samples[s][i]);
    out += "," + format_double(traj.F_along[s]) + "\n";
  }
  return out;
}

std::string flow_csv(const ParallelFlowReport& report) {
  const int n = static_cast<int>(report.points.front().front().size());
  std::string out = "t,seed_id";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i < n; ++i) out += ",mu_" + std::to_string(i);
  out += ",H_aniso,S_normal,H_mu\n";
  for (size_t ti = 0; ti < report.t_grid.size(); ++ti) {
    for (size_t s = 0; s < report.rows[ti].size(); ++s) {
      const ShapeReport& r = report.rows[ti][s];
      out += format_double(report.t_grid[ti]) + "," + std::to_string(s);
      for (int i = 0; i < n; ++i) out += "," + format_double(report.points[ti][s][i]);
      for (int i = 0; i + 1 < n; ++i) out += "," + format_double(r.principal[i]);
      out += "," + format_double(r.H_aniso) + "," + format_double(r.S_normal) + "," +
             format_double(r.H_mu) + "\n";
    }
  }
  return out;
}

}  // namespace finsler
