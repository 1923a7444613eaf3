#include "banachproj/json_io.hpp"

#include "banachproj/format.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banachproj {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

double parse_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

Json vec_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (double c : v) out.push_back(c);
  return out;
}

template <class T>
Json list_json(const std::vector<T>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(x);
  return out;
}

void write(std::ostringstream& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ',';
        first = false;
        out << pad << Json(key).dump() << sep;
        write(out, value, indent, depth + 1);
      }
      out << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out << '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out << (flat && indent > 0 ? ", " : ",");
        first = false;
        if (!flat) out << pad;
        write(out, value, indent, depth + 1);
      }
      if (!flat) out << close;
      out << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) out << format_double(v);
      else out << "null";
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

Eigen::VectorXd parse_coords(const Json& j, std::size_t n, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  if (j.size() != n) throw ConfigError(what + " must have " + std::to_string(n) + " entries");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = parse_number(j[i], what);
  return v;
}

LpVector parse_vector(const Json& j, std::size_t n, Exponent p, const std::string& what) {
  return LpVector(parse_coords(j, n, what), p);
}

ConvexSet parse_set(const Json& j, std::size_t n, Exponent p) {
  const std::string where = "set";
  const Json& type = field(j, "type", where);
  if (!type.is_string()) throw ConfigError("set.type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "ball")
    return ConvexSet::ball(parse_vector(field(j, "center", where), n, p, "set.center"),
                           parse_number(field(j, "radius", where), "set.radius"));
  if (t == "positive_cone") return ConvexSet::positive_cone(n, p);
  if (t == "coordinate_subspace") {
    const Json& m = field(j, "free_mask", where);
    if (!m.is_array() || m.size() != n) throw ConfigError("set.free_mask must be an array of " + std::to_string(n) + " booleans");
    std::vector<bool> mask;
    for (const auto& e : m) {
      if (e.is_boolean()) mask.push_back(e.get<bool>());
      else if (e.is_number_integer()) mask.push_back(e.get<int>() != 0);
      else throw ConfigError("set.free_mask entries must be booleans");
    }
    return ConvexSet::coordinate_subspace(std::move(mask), p);
  }
  if (t == "polytope_h") {
    const Json& rows = field(j, "rows", where);
    if (!rows.is_array()) throw ConfigError("set.rows must be an array");
    std::vector<HalfSpace> hs;
    for (const auto& r : rows)
      hs.push_back({parse_coords(field(r, "normal", "set.rows[]"), n, "set.rows[].normal"),
                    parse_number(field(r, "offset", "set.rows[]"), "set.rows[].offset")});
    return ConvexSet::polytope_h(std::move(hs), n, p);
  }
  if (t == "polytope_v") {
    const Json& vs = field(j, "vertices", where);
    if (!vs.is_array()) throw ConfigError("set.vertices must be an array");
    std::vector<LpVector> vertices;
    for (const auto& v : vs) vertices.push_back(parse_vector(v, n, p, "set.vertices[]"));
    return ConvexSet::polytope_v(std::move(vertices));
  }
  if (t == "segment")
    return ConvexSet::segment(parse_vector(field(j, "u", where), n, p, "set.u"),
                              parse_vector(field(j, "w", where), n, p, "set.w"));
  if (t == "ray")
    return ConvexSet::ray(parse_vector(field(j, "v", where), n, p, "set.v"),
                          parse_vector(field(j, "dir", where), n, p, "set.dir"));
  if (t == "singleton") return ConvexSet::singleton(parse_vector(field(j, "y", where), n, p, "set.y"));
  throw ConfigError("unknown set type \"" + t + "\"");
}

Json set_to_json(const ConvexSet& c) {
  Json out;
  out["type"] = c.type_name();
  if (const auto* b = c.as<Ball>()) {
    out["center"] = to_json(b->center);
    out["radius"] = b->radius;
  } else if (const auto* s = c.as<CoordinateSubspace>()) {
    out["free_mask"] = list_json(std::vector<bool>(s->free_mask.begin(), s->free_mask.end()));
  } else if (const auto* h = c.as<PolytopeH>()) {
    Json rows = Json::array();
    for (const auto& r : h->rows) rows.push_back(Json{{"normal", vec_json(r.normal)}, {"offset", r.offset}});
    out["rows"] = rows;
  } else if (const auto* v = c.as<PolytopeV>()) {
    Json vs = Json::array();
    for (const auto& x : v->vertices) vs.push_back(to_json(x));
    out["vertices"] = vs;
  } else if (const auto* seg = c.as<Segment>()) {
    out["u"] = to_json(seg->u);
    out["w"] = to_json(seg->w);
  } else if (const auto* r = c.as<Ray>()) {
    out["v"] = to_json(r->v);
    out["dir"] = to_json(r->dir);
  } else if (const auto* y = c.as<Singleton>()) {
    out["y"] = to_json(y->y);
  }
  return out;
}

Json to_json(const LpVector& v) { return vec_json(v.coords()); }

Json to_json(const ProjectionCertificate& cert) {
  return Json{{"point", to_json(cert.point)},
              {"residual", cert.residual},
              {"iterations", cert.iterations},
              {"distance", cert.distance},
              {"converged", cert.converged}};
}

Json to_json(const DerivativeResult& d) {
  Json out{{"value", to_json(d.value)}, {"case_label", d.case_label}};
  if (d.branch > 0) out["branch"] = d.branch;
  return out;
}

Json to_json(const BoundaryClass& b) {
  return Json{{"tag", b.tag == BoundaryTag::Up ? "up" : "down"}, {"margin", b.margin}};
}

Json to_json(const PointClass& pc) {
  Json out{{"tag", pc.tag == PointTag::Internal ? "internal" : "cuticle"}};
  out["witness"] = pc.witness ? to_json(*pc.witness) : Json(nullptr);
  return out;
}

Json to_json(const NumDiffResult& nd) {
  Json quotients = Json::array();
  for (const auto& q : nd.quotients) quotients.push_back(to_json(q));
  return Json{{"estimate", to_json(nd.estimate)},
              {"converged", nd.converged},
              {"extrapolated", nd.extrapolated},
              {"t_values", list_json(nd.t_values)},
              {"quotients", quotients}};
}

Json to_json(const RateReport& r) {
  return Json{{"pair_count", r.pairs.size()},
              {"fitted_order", r.fitted_order},
              {"fitted_constant", r.fitted_constant},
              {"uniform_sup", r.uniform_sup},
              {"uniform_sup_trace", list_json(r.uniform_sup_trace)},
              {"noise_floor", list_json(r.noise_floor)},
              {"k_enlarged", r.k_enlarged}};
}

Json to_json(const ModuliEstimate& est) {
  auto fit = [](const PowerFit& f) {
    return Json{{"constant", f.constant}, {"exponent", f.exponent}, {"rms", f.rms}, {"points", f.points}};
  };
  return Json{{"p", est.p},
              {"n", est.n},
              {"epsilons", list_json(est.epsilons)},
              {"delta_values", list_json(est.delta_values)},
              {"delta_bound", "upper"},
              {"ts", list_json(est.ts)},
              {"rho_values", list_json(est.rho_values)},
              {"rho_bound", "lower"},
              {"fit_a", est.convexity.constant},
              {"fit_p", est.convexity.exponent},
              {"fit_b", est.smoothness.constant},
              {"fit_q", est.smoothness.exponent},
              {"convexity_fit", fit(est.convexity)},
              {"smoothness_fit", fit(est.smoothness)},
              {"sample_count", est.sample_count},
              {"refinement_rounds", est.refinement_rounds}};
}

Json to_json(const AlberReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"k", c.k}, {"violated", c.violated}});
  return Json{{"violations", r.violations}, {"anomaly_rate", r.anomaly_rate}, {"checks", checks}};
}

std::string dump_json(const Json& j, int indent) {
  std::ostringstream out;
  write(out, j, indent, 0);
  return out.str();
}

std::string rate_csv(const RateReport& r) {
  std::ostringstream out;
  out << "direction_id,t,s,deviation\n";
  for (const auto& pr : r.pairs)
    out << pr.direction_id << ',' << format_double(pr.t) << ',' << format_double(pr.s) << ','
        << format_double(pr.deviation) << '\n';
  return out.str();
}

}  // namespace banachproj
