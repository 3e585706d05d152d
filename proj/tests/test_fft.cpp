#include <gtest/gtest.h>

#include <complex>
#include <vector>

#include "faultrank/fft.hpp"
#include "faultrank/rng.hpp"
#include "support/oracles.hpp"

using namespace faultrank;

namespace {

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

}  // namespace

TEST(Fft, MatchesNaiveDftPowerOfTwo) {
    const auto x = random_series(64, 1);
    const auto fast = fft_real(x);
    const auto slow = oracles::naive_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k)
        EXPECT_NEAR(std::abs(fast[k] - slow[k]), 0.0, 1e-9);
}

TEST(Fft, MatchesNaiveDftArbitraryLength) {
    for (std::size_t n : {3u, 10u, 100u, 257u}) {
        const auto x = random_series(n, n);
        const auto fast = fft_real(x);
        const auto slow = oracles::naive_dft(x);
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_NEAR(std::abs(fast[k] - slow[k]), 0.0, 1e-8) << "n=" << n << " k=" << k;
    }
}

TEST(Fft, RoundTripRestoresSignal) {
    for (std::size_t n : {8u, 12u, 2000u}) {
        const auto x = random_series(n, 3 * n);
        const auto back = fft(fft_real(x), true);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i].real(), x[i], 1e-9);
    }
}

TEST(Fft, RejectsEmptyInput) {
    EXPECT_THROW(fft({}), ParamError);
}
