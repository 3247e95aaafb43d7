// Flux-qubit error bound with calibrated 1/nu noise, against rotating-frame simulation.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "adiabound/models.hpp"

using namespace adiabound;

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    FluxQubitModel m;
    attach_noise(m, FluxNoiseSpec{1e-10, 100, 2500.0, 3500.0, seed});

    const FluxNoiseAmplitudes amp = calibrate_flux_noise(m);
    std::printf("seed %llu: sup|N| = %.4e, sup|dN/dt| = %.4e MHz, sup|d2N/dt2| = %.4e MHz^2\n",
                static_cast<unsigned long long>(seed), amp.value, amp.first, amp.second);

    const std::vector<double> taus = {0.002, 0.005, 0.01, 0.02, 0.05};
    const NoiseBoundInputs in = flux_bound_inputs(m, amp, taus);
    const BoundTerms t = in.bound(1.0).terms;
    std::printf("bound = %.4f tau + %.4g + %.4f / tau   (delta0 = %.3e, delta1 = %.3e)\n", t.tau_linear_coeff,
                t.constant_term + t.endpoint_term, t.inv_tau_coeff, in.overlaps.delta0, in.overlaps.delta1);
    std::printf("%10s %14s %14s\n", "tau [us]", "bound", "simulated");
    for (double tau : taus) {
        std::printf("%10.4f %14.6g %14.6g\n", tau, in.bound(tau).value, flux_simulate(m, tau).final_error);
    }
}
