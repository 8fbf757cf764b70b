#include "glucast/numerics.hpp"

#include <cmath>
#include <string>

namespace glucast {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul: incompatible shapes " + shape_str(a.rows, a.cols) +
                         " and " + shape_str(b.rows, b.cols));
    }
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        double* orow = out.data.data() + i * out.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            const double* brow = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Vec matvec(const Matrix& a, const Vec& x) {
    if (a.cols != x.size()) {
        throw ShapeError("matvec: matrix " + shape_str(a.rows, a.cols) +
                         " times vector of length " + std::to_string(x.size()));
    }
    Vec out(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = a.data.data() + i * a.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        out[i] = acc;
    }
    return out;
}

Vec matvec_transposed(const Matrix& a, const Vec& y) {
    if (a.rows != y.size()) {
        throw ShapeError("matvec_transposed: matrix " + shape_str(a.rows, a.cols) +
                         " transposed times vector of length " + std::to_string(y.size()));
    }
    Vec out(a.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = a.data.data() + i * a.cols;
        const double yi = y[i];
        for (std::size_t j = 0; j < a.cols; ++j) out[j] += row[j] * yi;
    }
    return out;
}

void add_outer(Matrix& acc, const Vec& u, const Vec& v) {
    if (acc.rows != u.size() || acc.cols != v.size()) {
        throw ShapeError("add_outer: accumulator " + shape_str(acc.rows, acc.cols) +
                         " vs outer product " + shape_str(u.size(), v.size()));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        double* row = acc.data.data() + i * acc.cols;
        const double ui = u[i];
        for (std::size_t j = 0; j < v.size(); ++j) row[j] += ui * v[j];
    }
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

Vec sigmoid_map(const Vec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
    return out;
}

Vec tanh_map(const Vec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

Vec concat(const Vec& a, const Vec& b) {
    Vec out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

namespace {
void require_same_length(const Vec& a, const Vec& b, const char* op) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(op) + ": lengths " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
    }
}
}  // namespace

Vec add(const Vec& a, const Vec& b) {
    require_same_length(a, b, "add");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vec sub(const Vec& a, const Vec& b) {
    require_same_length(a, b, "sub");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vec hadamard(const Vec& a, const Vec& b) {
    require_same_length(a, b, "hadamard");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Vec scale(const Vec& a, double s) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
    return out;
}

SeededRng::SeededRng(std::uint64_t seed) {
    // splitmix64 expansion guarantees a non-zero xoshiro state for any seed.
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t SeededRng::next_u64() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

double SeededRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double SeededRng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

double SeededRng::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

std::uint64_t SeededRng::next_below(std::uint64_t n) {
    if (n == 0) throw InputError("next_below: bound must be positive");
    // Lemire's unbiased multiply-shift rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(next_u64()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t x = master + stream * 0x9e3779b97f4a7c15ULL;
    splitmix64(x);
    return splitmix64(x);
}

}  // namespace glucast
