// Builds the two-component default model and prints its survival function
// under three different failure thresholds, one column per threshold, as
// csv on stdout. Pipe into a plotting tool of choice.

#include <cstdio>
#include <vector>

#include "mgcp/config.hpp"
#include "mgcp/shock.hpp"

int main() {
  const mgcp::RunConfig base = mgcp::default_config();

  const std::vector<std::pair<const char*, mgcp::ThresholdDistribution>>
      thresholds{
          {"geometric_p25", mgcp::GeometricThreshold{0.25}},
          {"geometric_p75", mgcp::GeometricThreshold{0.75}},
          {"hypergeometric_6_3_2", mgcp::HypergeometricThreshold{6, 3, 2}},
      };

  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.1 * i);

  std::vector<std::vector<std::pair<double, double>>> curves;
  for (const auto& [name, dist] : thresholds) {
    const mgcp::ShockModel sm{base.model, dist};
    curves.push_back(mgcp::survival_curve(sm, grid, base.series));
  }

  std::printf("t");
  for (const auto& [name, dist] : thresholds) std::printf(",%s", name);
  std::printf("\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::printf("%.2f", grid[i]);
    for (const auto& curve : curves) std::printf(",%.12g", curve[i].second);
    std::printf("\n");
  }
  return 0;
}
