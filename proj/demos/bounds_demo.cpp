// Prints every lower bound, the witnesses and the numerical supremum for a
// pair of unit vectors at 60 degrees and for a random 5-vector configuration.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "polar/polar.hpp"

namespace {

void show(const char* title, const polar::Configuration& config) {
  polar::ReportOptions options;
  options.with_sup = true;
  const polar::BoundReport r = polar::full_report(config, options);

  std::printf("%s (n = %zu)\n", title, r.n);
  std::printf("  threshold n^{-n/2}  %.9f\n", r.threshold.value);
  std::printf("  marcus              %.9f\n", r.marcus.value);
  if (r.harmonic) std::printf("  harmonic            %.9f\n", r.harmonic->value);
  if (r.thm1) std::printf("  column lengths      %.9f\n", r.thm1->value);
  if (r.thm2) std::printf("  largest eigenvalue  %.9f\n", r.thm2->value);
  if (r.thm3) std::printf("  diagonal of root    %.9f\n", r.thm3->value);
  for (const polar::Witness& w : r.witnesses)
    std::printf("  witness %-15s achieves %.9f\n", polar::to_string(w.construction).c_str(), w.achieved);
  std::printf("  sup estimate        %.9f\n\n", *r.sup_estimate);
}

}  // namespace

int main() {
  const double theta = std::numbers::pi / 3.0;
  show("pair at 60 degrees", polar::Configuration({{1.0, 0.0}, {std::cos(theta), std::sin(theta)}}));

  polar::Rng rng = polar::make_rng(7);
  show("random configuration", polar::random_configuration(5, rng));
  return 0;
}
