#ifndef EIP_SCENARIO_HPP
#define EIP_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eip/calculus.hpp"
#include "eip/coefficient.hpp"
#include "eip/field.hpp"
#include "eip/motion.hpp"
#include "eip/spatial_operator.hpp"

namespace eip {

struct DiscretizationParams {
  int cells = 8;
  int slabs = 8;
  int quad_space = 4;
  int quad_time = 3;
  int ref_cells = 512;
  int jobs = 1;
};

struct Scenario {
  std::string name = "custom";
  MotionMap motion;
  PiecewiseCoefficient coefficient;
  SpatialOperator op;
  TimeDependentField g1;
  SpatialField g2 = zero_spatial();
  std::optional<TimeDependentField> exact;
  DiscretizationParams disc;
  std::vector<std::pair<int, int>> levels = {{4, 4}, {8, 8}, {16, 16}, {32, 32}};
  std::vector<double> eps_list = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> lambda0s = {1.0, -1.0};
  std::uint64_t seed = 0;
  nlohmann::json normalized; // full config with defaults filled

  NormContext ctx() const;
};

// Parse + validate a JSON scenario config. Unknown keys are rejected, all
// defaults are filled into `normalized`.
Scenario parse_config(const std::string& path);
Scenario scenario_from_json(const nlohmann::json& cfg);
std::string normalized_dump(const Scenario& s);

// Built-in benchmark scenarios: m1 (smooth), m2 (jump-flux), m3 (degenerate),
// heat (static heat benchmark), heat_neumann_exact (bilinear exact solution).
Scenario manufactured_scenario(const std::string& name);

// Named Eulerian fields used by configs and studies.
TimeDependentField field_by_name(const std::string& name);
SpatialField spatial_by_name(const std::string& name, double amplitude);

// FNV-1a hash of a string (manifest / CSV input hashes).
std::uint64_t fnv1a(const std::string& data);

} // namespace eip

#endif
