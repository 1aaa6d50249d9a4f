// Walks through the closed-form evaluators next to their Monte Carlo
// estimates: component means, covariance, the zero-state mass, and the
// failure survival, each printed with the sampling error so the agreement
// is visible at a glance.

#include <cstdio>
#include <vector>

#include "mgcp/config.hpp"
#include "mgcp/montecarlo.hpp"
#include "mgcp/shock.hpp"
#include "mgcp/timechanged.hpp"

namespace {

void report(const char* what, double analytic, const mgcp::McEstimate& est) {
  std::printf("%-28s analytic %12.6f   sampled %12.6f +- %.6f\n", what,
              analytic, est.value, est.std_err);
}

}  // namespace

int main() {
  const mgcp::RunConfig cfg = mgcp::default_config();
  const mgcp::TcModelParams& p = cfg.model;
  const double t = 1.0;

  mgcp::McConfig mc;
  mc.samples = 200000;
  mc.seed = 42;
  mc.workers = 1;

  for (int i = 0; i < p.q(); ++i) {
    char label[32];
    std::snprintf(label, sizeof label, "component %d mean", i + 1);
    const auto est = mgcp::estimate(
        [&](mgcp::Rng& rng) {
          return static_cast<double>(
              mgcp::sample_tc(p, t, rng)[static_cast<std::size_t>(i)]);
        },
        mc);
    report(label, mgcp::tc_mean(p, i, t), est);
    ++mc.seed;
  }

  {
    const double m1 = mgcp::tc_mean(p, 0, t), m2 = mgcp::tc_mean(p, 1, t);
    const auto est = mgcp::estimate(
        [&](mgcp::Rng& rng) {
          const auto m = mgcp::sample_tc(p, t, rng);
          return (static_cast<double>(m[0]) - m1) *
                 (static_cast<double>(m[1]) - m2);
        },
        mc);
    report("cross covariance", mgcp::tc_cov(p, 0, 1, t), est);
    ++mc.seed;
  }

  {
    const std::vector<long long> zero(static_cast<std::size_t>(p.q()), 0);
    const auto est = mgcp::estimate(
        [&](mgcp::Rng& rng) {
          const auto m = mgcp::sample_tc(p, t, rng);
          return m[0] == 0 && m[1] == 0 ? 1.0 : 0.0;
        },
        mc);
    report("zero-state mass", mgcp::tc_pmf(p, zero, t, cfg.series).value, est);
    ++mc.seed;
  }

  {
    const mgcp::ShockModel sm{p, cfg.threshold};
    const auto est = mgcp::estimate(
        [&](mgcp::Rng& rng) {
          const auto m = mgcp::sample_tc(p, t, rng);
          double prod = 1.0;
          for (int i = 0; i < p.q(); ++i)
            prod *= mgcp::threshold_survival(sm.threshold,
                                             m[static_cast<std::size_t>(i)]);
          return prod;
        },
        mc);
    report("failure survival", mgcp::failure_survival(sm, t, cfg.series).value,
           est);
  }

  return 0;
}
