#pragma once

// JSON encoding of set descriptors, vectors, and every report type. Output
// goes through dump_json, which prints doubles as %.17g so identical inputs
// give byte-identical files.

#include "banachproj/convex_sets.hpp"
#include "banachproj/derivatives.hpp"
#include "banachproj/moduli.hpp"
#include "banachproj/numdiff.hpp"
#include "banachproj/projection_solver.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace banachproj {

using Json = nlohmann::ordered_json;

/// Structurally invalid configuration or descriptor JSON.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Eigen::VectorXd parse_coords(const Json& j, std::size_t n, const std::string& what);
LpVector parse_vector(const Json& j, std::size_t n, Exponent p, const std::string& what);

/// {"type": "ball", "center": [...], "radius": r}, {"type": "positive_cone"},
/// {"type": "coordinate_subspace", "free_mask": [true, false, ...]},
/// {"type": "polytope_h", "rows": [{"normal": [...], "offset": b}, ...]},
/// {"type": "polytope_v", "vertices": [[...], ...]}, {"type": "segment", "u", "w"},
/// {"type": "ray", "v", "dir"}, {"type": "singleton", "y"}.
ConvexSet parse_set(const Json& j, std::size_t n, Exponent p);
Json set_to_json(const ConvexSet& c);

Json to_json(const LpVector& v);
Json to_json(const ProjectionCertificate& cert);
Json to_json(const DerivativeResult& d);
Json to_json(const BoundaryClass& b);
Json to_json(const PointClass& pc);
Json to_json(const NumDiffResult& nd);
Json to_json(const RateReport& r);
Json to_json(const ModuliEstimate& est);
Json to_json(const AlberReport& r);

/// Serializer with fixed %.17g doubles; non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);

/// CSV with header "direction_id,t,s,deviation".
std::string rate_csv(const RateReport& r);

}  // namespace banachproj
