// Prints every constant of the kernel stability estimate for a wide kernel,
// where the constants stay finite, and for the narrow default kernel.

#include <iostream>

#include "nlwr/nlwr.hpp"

namespace {

void show(double eta, double t) {
    nlwr::ExperimentConfig cfg;
    cfg.dx = 0.01;
    cfg.eta = eta;
    cfg.T = t;
    const nlwr::Problem p = nlwr::make_problem(cfg);
    cfg.delta = 0.2 * eta;
    const nlwr::Problem q = nlwr::make_problem(cfg);
    auto report = nlwr::stability_bound_kernel(p, q, t);
    report.empirical = nlwr::l1_distance(nlwr::solve(p).final_state(), nlwr::solve(q).final_state());
    std::cout << "eta = " << eta << ", delta offset " << 0.2 * eta << '\n' << nlwr::format_report(report) << '\n';
}

}  // namespace

int main() {
    show(1.0, 0.05);
    show(0.1, 0.5);
}
