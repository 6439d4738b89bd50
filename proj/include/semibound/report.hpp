#pragma once

#include "semibound/bounds.hpp"
#include "semibound/ergodic.hpp"
#include "semibound/poisson.hpp"
#include "semibound/sde.hpp"
#include "semibound/semigroup.hpp"
#include "semibound/singular.hpp"
#include "semibound/types.hpp"

#include <string>
#include <vector>

// vendored single-header json
#include "json.hpp"

namespace semibound {

using json = nlohmann::json;

json to_json(const Vec& v);
json to_json(const LocalNormReport& r);
json to_json(const BoundReport& r);
json to_json(const DerivativeEstimate& e);
json to_json(const VerificationReport& r);
json to_json(const MomentReport& r);
json to_json(const LyapunovFit& f);
json to_json(const DecayFit& f);
json to_json(const PoissonSolution& s);
json to_json(const ResidualReport& r);
json to_json(const PoissonVerifyReport& r);
json to_json(const CauchyReport& r);
json to_json(const KrylovFit& f);
json to_json(const UniformGradientReport& r);
json to_json(const LineFit& f);

/// One CSV row per cell: t, x, measured, se, rhs, ratio.
void write_verification_csv(const VerificationReport& r,
                            const std::string& path);
/// One CSV row per cell: n, t, x, measured, rhs, ratio.
void write_uniform_csv(const UniformGradientReport& r, const std::string& path);
/// Flat (t, x) matrix of bound values.
void write_bounds_csv(const std::vector<BoundReport>& rows,
                      const std::string& path);

/// Little-endian float64 columnar dump plus a JSON sidecar describing the
/// layout (path-major: all times of path 0, then path 1, ...).
void write_columnar(const Mat& rows_by_cols, const std::string& path,
                    const json& sidecar_extra = {});

void write_text(const std::string& path, const std::string& content);

}  // namespace semibound
