#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "glucast/errors.hpp"

namespace glucast {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Shapes in this project stay tiny
/// (at most 64x64), so there is no sparse or blocked path.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;  // row-major, length rows*cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    static Matrix identity(std::size_t n);
};

/// Standard matrix product. Throws ShapeError naming both shapes when
/// a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * x for a column vector x. Throws ShapeError on length mismatch.
Vec matvec(const Matrix& a, const Vec& x);

/// a^T * y without materializing the transpose.
Vec matvec_transposed(const Matrix& a, const Vec& y);

/// acc += u * v^T. acc must already have shape u.size() x v.size().
void add_outer(Matrix& acc, const Vec& u, const Vec& v);

/// Logistic function 1/(1+e^-x); output in (0,1) away from saturation.
double sigmoid(double x);

Vec sigmoid_map(const Vec& v);
Vec tanh_map(const Vec& v);

/// [a, b] with a's entries first.
Vec concat(const Vec& a, const Vec& b);

// Elementwise vector arithmetic. Two-vector forms throw ShapeError on
// length mismatch.
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec hadamard(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double s);

/// Deterministic PRNG: xoshiro256++ seeded through splitmix64. The
/// algorithm is fixed so two builds given equal seeds produce identical
/// draw sequences on any platform. Single-owner: parallel workers must
/// each hold their own instance (see derive_seed).
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0,1) with 53 random bits.
    double next_double();

    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal();
    double normal(double mean, double stddev);

    /// Unbiased integer in [0,n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    /// Fisher-Yates shuffle driven by this generator.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::array<std::uint64_t, 4> state_{};
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

/// Child seed for an independent task stream, so per-task generators can
/// run in parallel without sharing state. Deterministic in (master, stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace glucast
