// Runs the circular-road experiment and prints the density at a few times
// together with the two congestion measures.

#include <cstdio>

#include "nlwr/nlwr.hpp"

int main() {
    nlwr::ExperimentConfig cfg;
    cfg.snapshot_stride = 200;
    const nlwr::Problem problem = nlwr::make_problem(cfg);
    const nlwr::Solution sol = nlwr::solve(problem);

    std::printf("%zu steps, alpha = %.4f, max mass drift = %.3e\n", sol.n_steps(), sol.alpha, sol.max_mass_drift);
    for (std::size_t i = 0; i < sol.snapshots.size(); ++i) {
        const auto& s = sol.snapshots[i];
        std::printf("t = %.4f  min = %.6f  max = %.6f  TV = %.6f\n", sol.times[i], s.min(), s.max(), nlwr::tv(s));
    }
    std::printf("J = %.6e  Psi = %.6e\n", nlwr::functional_j(sol), nlwr::functional_psi(sol, cfg.queue_a, cfg.queue_b));
}
