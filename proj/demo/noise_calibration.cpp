// Amplitude bounds and banded periodogram of a 1/nu cosine-sum noise realization.

#include <cstdio>

#include "adiabound/noise.hpp"

using namespace adiabound;

int main() {
    const auto noise = OneOverFNoise::seeded(1e-10, 100, 2500.0, 3500.0, 42);
    const AmplitudeBounds b = amplitude_bounds(noise);
    std::printf("sup|N|      = %.4e  (cap %.4e)\n", b.value, b.cap_value);
    std::printf("sup|dN/dt|  = %.4e  (cap %.4e) MHz\n", b.first, b.cap_first);
    std::printf("sup|d2N/dt2|= %.4e  (cap %.4e) MHz^2\n", b.second, b.cap_second);

    std::printf("\n%12s %14s %14s\n", "nu [MHz]", "power", "power * nu");
    for (const auto& bin : banded_periodogram(noise, 2.0, 20000, 5)) {
        std::printf("%12.1f %14.4e %14.4e\n", bin.nu_center, bin.mean_power, bin.mean_power * bin.nu_center);
    }
}
