#include <gtest/gtest.h>

#include <cmath>

#include "faultrank/math_util.hpp"
#include "faultrank/matrix.hpp"
#include "faultrank/rng.hpp"

using namespace faultrank;

TEST(Digamma, KnownValues) {
    // psi(1) = -gamma, psi(n) = -gamma + H_{n-1}
    const double gamma = 0.5772156649015329;
    EXPECT_NEAR(digamma(1.0), -gamma, 1e-12);
    EXPECT_NEAR(digamma(2.0), -gamma + 1.0, 1e-12);
    EXPECT_NEAR(digamma(4.0), -gamma + 1.0 + 0.5 + 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(digamma(0.5), -gamma - 2.0 * std::log(2.0), 1e-12);
    EXPECT_NEAR(digamma(10000.0), std::log(10000.0) - 0.5 / 10000.0, 1e-8);
}

TEST(Digamma, RecurrenceProperty) {
    for (double x : {0.3, 1.7, 5.5, 42.0}) {
        EXPECT_NEAR(digamma(x + 1.0), digamma(x) + 1.0 / x, 1e-12);
    }
}

TEST(Digamma, RejectsNonPositive) {
    EXPECT_THROW(digamma(0.0), ParamError);
    EXPECT_THROW(digamma(-1.0), ParamError);
}

TEST(Stats, MeanAndStd) {
    const std::vector<double> v{1.0, 2.0, 3.0};
    EXPECT_DOUBLE_EQ(mean(v), 2.0);
    EXPECT_DOUBLE_EQ(sample_std(v), 1.0);
}

TEST(Stats, AutocorrelationOfAlternatingSeries) {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(i % 2 == 0 ? 1.0 : -1.0);
    EXPECT_LT(autocorrelation(v, 1), -0.9);
}

TEST(Rng, DeterministicPerSeed) {
    Rng a(42), b(42), c(43);
    const double x = a.uniform01();
    EXPECT_DOUBLE_EQ(x, b.uniform01());
    EXPECT_NE(x, c.uniform01());
}

TEST(Rng, NormalMoments) {
    Rng rng(7);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, BelowIsUniform) {
    Rng rng(11);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
    for (int c : counts) EXPECT_NEAR(c, 10000, 450);
}

TEST(MatrixOps, MultiplyAndTranspose) {
    Matrix m(2, 3);
    m(0, 0) = 1; m(0, 1) = 2; m(0, 2) = 3;
    m(1, 0) = 4; m(1, 1) = 5; m(1, 2) = 6;
    const auto y = multiply(m, {1.0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(y[0], 6.0);
    EXPECT_DOUBLE_EQ(y[1], 15.0);
    const Matrix t = transpose(m);
    EXPECT_EQ(t.rows(), 3u);
    EXPECT_DOUBLE_EQ(t(2, 1), 6.0);
}
