#include "pactest/types.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace pactest {

void PriceBox::validate() const {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
        throw DomainError("price box must satisfy 0 < lo < hi < inf");
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ stream) ^ index);
}

std::vector<EvalPoint> draw_points(int K, std::size_t n, const PriceBox& box, double income,
                                   std::uint64_t seed) {
    box.validate();
    if (K < 1) throw DimensionError("draw_points: K must be positive");
    if (!(income > 0.0)) throw DomainError("draw_points: income must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(box.lo, box.hi);
    std::vector<EvalPoint> points(n);
    for (auto& pt : points) {
        pt.prices.resize(K);
        for (int k = 0; k < K; ++k) pt.prices[k] = unif(rng);
        pt.income = income;
    }
    return points;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace pactest
