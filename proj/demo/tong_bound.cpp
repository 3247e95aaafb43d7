// Bound versus exact error for a spin in a slowly rotating field.

#include <cstdio>

#include "adiabound/models.hpp"

using namespace adiabound;

int main() {
    const TongModel m{0.001, 10.0, -10.0};
    const NoiseBoundInputs in = tong_bound_inputs(m);
    const BoundTerms t = in.bound(1.0).terms;
    std::printf("chi(tau) = %.8f + %.8f tau   (delta0 = delta1 = %.3g)\n",
                t.constant_term + t.endpoint_term, t.tau_linear_coeff, in.overlaps.delta0);
    std::printf("%8s %14s %14s %14s\n", "tau", "bound", "exact", "simulated");
    for (double tau : {0.5, 1.0, 5.0, 10.0, 20.0, 50.0}) {
        const double sim = tong_simulate(m, tau, {tau}).errors.back();
        std::printf("%8.2f %14.8f %14.8f %14.8f\n", tau, in.bound(tau).value, tong_exact_error(m, tau), sim);
    }
}
