// Walks through one small instance of each analysis: the d = 4 Bell value,
// the largest avoidance set, the CHSH critical efficiency and the rejection
// protocol cost.
#include <cstdio>

#include "bellsim/bridge.hpp"

using namespace bellsim;

int main() {
  const Scenario bct = build_bct_scenario(2);
  for (double eta : {1.0, 0.8, 0.5}) {
    const auto v = bell_value_quantum(bct.d(), Efficiency(eta));
    std::printf("d=4 eta=%.2f  I=%.4f  normalized=%.4f\n", eta, *v.raw, v.normalized);
  }

  const AvoidanceSet z = max_z_exact(6);
  std::printf("largest avoidance set at d=6: %zu strings, e.g. %s\n", z.size(), z.members.front().to_string().c_str());

  const Scenario chsh = make_chsh_scenario();
  const std::vector<Setting> two = {std::size_t{0}, std::size_t{1}};
  const auto star = eta_star_bisection(chsh, two, two, 1e-4);
  std::printf("CHSH critical efficiency in [%.5f, %.5f]\n", star.lower, star.upper);

  const std::vector<Setting> labels = {BitString::from_string("0000"), BitString::from_string("1100")};
  const auto model = efficiency_model(bct, labels, labels, 0.5);
  const auto stats = average_communication_stats(model, bct.d(), {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 200000, 1);
  std::printf("rejection protocol at eta=0.5: %.3f bits on average (2/eta^2 = %.1f)\n", stats.mean_bits, c_from_eta(0.5));
}
