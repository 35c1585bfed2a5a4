#pragma once

// JSON and CSV renderings of module results. Floating-point values are
// printed with 17 significant digits so they round-trip exactly.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grk/control.hpp"
#include "grk/extremal_optimizer.hpp"
#include "grk/full_space.hpp"
#include "grk/grk_parameters.hpp"
#include "grk/reduced_model.hpp"
#include "grk/sequence_search.hpp"

namespace grk {

using Json = nlohmann::ordered_json;

Json to_json(const DatabaseGeometry& geom);
Json to_json(const ReducedState& state);
Json to_json(const Eigen::Matrix3d& matrix);
Json to_json(const GrkParameters& params);
Json to_json(const TerminalResidual& residual);
Json to_json(const GrkRun& run);
Json to_json(const GlgResult& glg);
Json to_json(const SearchReport& report);
Json to_json(const OracleComparison& cmp);
Json to_json(const PhiTriple& phi);
Json to_json(const CompressionReport& report);
Json to_json(const EndpointReport& report);
Json to_json(const ArcSchedule& schedule);
Json to_json(const PatternComparison& cmp);
/// Summary without the samples: switching times, arcs, Hamiltonian spread.
Json to_json(const ExtremalTrajectory& traj);

/// Compact JSON with doubles as %.17g and non-finite values as null.
std::string dump_json(const Json& value);

std::string format_double(double value);

inline constexpr const char* kTrajectoryCsvHeader =
    "t,psi_t,psi_ntt,psi_u,p1,p2,p3,phi1,phi2,phi3,control,H";
inline constexpr const char* kLandscapeCsvHeader = "k1,k2,residual";

std::string trajectory_csv(const ExtremalTrajectory& traj);
std::string landscape_csv(const std::vector<LandscapePoint>& points);

class UnwritablePath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to a sibling temporary file and renames it over `path`, so a failed
/// write leaves no partial file. Throws UnwritablePath.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace grk
