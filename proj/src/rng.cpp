#include "gbmlab/rng.hpp"

namespace gbmlab {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

std::vector<double> normal_draws(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 engine(mix64(seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(count);
    for (auto& v : z) {
        v = normal(engine);
    }
    return z;
}

}  // namespace gbmlab
