#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "glucast/numerics.hpp"

using namespace glucast;

TEST_CASE("matmul against a direct triple loop") {
    SeededRng rng(42);
    Matrix a(5, 7), b(7, 3);
    for (double& v : a.data) v = rng.uniform(-2.0, 2.0);
    for (double& v : b.data) v = rng.uniform(-2.0, 2.0);

    const Matrix c = matmul(a, b);
    REQUIRE(c.rows == 5);
    REQUIRE(c.cols == 3);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double want = 0.0;
            for (std::size_t k = 0; k < 7; ++k) want += a(i, k) * b(k, j);
            CHECK(c(i, j) == doctest::Approx(want).epsilon(1e-15));
        }
    }
}

TEST_CASE("identity is a matmul no-op") {
    SeededRng rng(7);
    Matrix a(4, 4);
    for (double& v : a.data) v = rng.uniform(-1.0, 1.0);
    const Matrix left = matmul(Matrix::identity(4), a);
    const Matrix right = matmul(a, Matrix::identity(4));
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        CHECK(left.data[i] == a.data[i]);
        CHECK(right.data[i] == a.data[i]);
    }
}

TEST_CASE("matmul shape mismatch throws") {
    Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_AS(matmul(a, b), ShapeError);
}

TEST_CASE("matvec and matvec_transposed agree with explicit sums") {
    Matrix a(3, 4);
    double fill = 0.5;
    for (double& v : a.data) v = (fill += 0.25);
    const Vec x = {1.0, -2.0, 0.5, 3.0};
    const Vec y = {2.0, 0.0, -1.0};

    const Vec ax = matvec(a, x);
    REQUIRE(ax.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        double want = 0.0;
        for (std::size_t j = 0; j < 4; ++j) want += a(i, j) * x[j];
        CHECK(ax[i] == doctest::Approx(want).epsilon(1e-15));
    }

    const Vec aty = matvec_transposed(a, y);
    REQUIRE(aty.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        double want = 0.0;
        for (std::size_t i = 0; i < 3; ++i) want += a(i, j) * y[i];
        CHECK(aty[j] == doctest::Approx(want).epsilon(1e-15));
    }

    CHECK_THROWS_AS(matvec(a, y), ShapeError);
    CHECK_THROWS_AS(matvec_transposed(a, x), ShapeError);
}

TEST_CASE("add_outer accumulates u v^T") {
    Matrix acc(2, 3);
    acc(0, 0) = 1.0;
    add_outer(acc, {2.0, -1.0}, {1.0, 0.5, 3.0});
    CHECK(acc(0, 0) == 3.0);   // 1 + 2*1
    CHECK(acc(0, 1) == 1.0);   // 2*0.5
    CHECK(acc(0, 2) == 6.0);   // 2*3
    CHECK(acc(1, 0) == -1.0);
    CHECK(acc(1, 1) == -0.5);
    CHECK(acc(1, 2) == -3.0);

    Vec wrong = {1.0};
    CHECK_THROWS_AS(add_outer(acc, wrong, wrong), ShapeError);
}

TEST_CASE("sigmoid fixed points and symmetry") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(100.0) == doctest::Approx(1.0));
    CHECK(sigmoid(-100.0) == doctest::Approx(0.0));
    // sigma(-x) = 1 - sigma(x)
    for (double x : {0.1, 0.7, 2.5, 10.0}) {
        CHECK(sigmoid(-x) == doctest::Approx(1.0 - sigmoid(x)).epsilon(1e-15));
    }
    // Stays finite and inside (0,1) even at extreme inputs.
    CHECK(sigmoid(1000.0) <= 1.0);
    CHECK(sigmoid(-1000.0) >= 0.0);
    CHECK(std::isfinite(sigmoid(-1000.0)));
}

TEST_CASE("elementwise vector ops") {
    const Vec a = {1.0, 2.0, 3.0};
    const Vec b = {4.0, -1.0, 0.5};
    CHECK(add(a, b) == Vec{5.0, 1.0, 3.5});
    CHECK(sub(a, b) == Vec{-3.0, 3.0, 2.5});
    CHECK(hadamard(a, b) == Vec{4.0, -2.0, 1.5});
    CHECK(scale(a, -2.0) == Vec{-2.0, -4.0, -6.0});
    CHECK(concat(a, b) == Vec{1.0, 2.0, 3.0, 4.0, -1.0, 0.5});
    CHECK(concat({}, b) == b);

    const Vec short_v = {1.0};
    CHECK_THROWS_AS(add(a, short_v), ShapeError);
    CHECK_THROWS_AS(hadamard(a, short_v), ShapeError);
}

TEST_CASE("sigmoid_map and tanh_map apply pointwise") {
    const Vec v = {0.0, 1.0, -1.0};
    const Vec s = sigmoid_map(v);
    const Vec t = tanh_map(v);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 0.5);
    CHECK(s[1] == doctest::Approx(sigmoid(1.0)));
    CHECK(t[0] == 0.0);
    CHECK(t[1] == doctest::Approx(std::tanh(1.0)));
    CHECK(t[2] == doctest::Approx(-t[1]));
}

TEST_CASE("rng is deterministic for equal seeds") {
    SeededRng a(123), b(123), c(124);
    bool all_equal = true;
    bool any_diff_seed_mismatch = false;
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff_seed_mismatch = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_seed_mismatch);
}

TEST_CASE("next_double stays in [0,1) and fills the range") {
    SeededRng rng(9);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform respects bounds") {
    SeededRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double d = rng.uniform(-3.0, 5.0);
        CHECK(d >= -3.0);
        CHECK(d < 5.0);
    }
}

TEST_CASE("normal draws have sane moments") {
    SeededRng rng(31);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = rng.normal();
        sum += d;
        sumsq += d * d;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));

    SeededRng rng2(31);
    const double shifted = rng2.normal(10.0, 2.0);
    SeededRng rng3(31);
    CHECK(shifted == doctest::Approx(10.0 + 2.0 * rng3.normal()).epsilon(1e-15));
}

TEST_CASE("next_below is bounded and hits every residue") {
    SeededRng rng(5);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = rng.next_below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK(rng.next_below(1) == 0);
}

TEST_CASE("shuffle is a permutation and deterministic") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;

    std::vector<int> identity = v;

    SeededRng a(77), b(77);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    CHECK(v != identity);

    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("derive_seed separates streams deterministically") {
    const std::uint64_t s1 = derive_seed(1000, 1);
    const std::uint64_t s2 = derive_seed(1000, 2);
    CHECK(s1 == derive_seed(1000, 1));
    CHECK(s1 != s2);
    CHECK(s1 != derive_seed(1001, 1));

    // Streams of one master never collide with nearby masters' streams
    // in a small probe grid.
    std::set<std::uint64_t> all;
    for (std::uint64_t m = 0; m < 20; ++m) {
        for (std::uint64_t s = 0; s < 20; ++s) all.insert(derive_seed(m, s));
    }
    CHECK(all.size() == 400);
}
