#include "glucast/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "glucast/errors.hpp"

namespace glucast::baselines {

namespace {

// Gaussian elimination with partial pivoting on the (p+1)-sized normal
// equations. Shapes here never exceed 5x5.
Vec solve_linear(Matrix a, Vec b) {
    const std::size_t n = a.rows;
    double scale = 0.0;
    for (double v : a.data) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw NumericError("arima_fit: singular normal equations");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (std::abs(a(pivot, col)) < 1e-12 * scale) {
            throw NumericError("arima_fit: singular normal equations");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
            b[r] -= factor * b[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

Vec difference(const Vec& v) {
    Vec d(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) d[i] = v[i + 1] - v[i];
    return d;
}

bool all_equal(const Vec& v) {
    for (double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

}  // namespace

ArimaModel arima_fit(const Vec& series, std::size_t p, std::size_t d) {
    if (d > 1) throw ConfigError("arima_fit: differencing order must be 0 or 1");
    if (series.size() <= p + d + 10) {
        throw InputError("arima_fit: series of length " + std::to_string(series.size()) +
                         " too short for p=" + std::to_string(p) + ", d=" + std::to_string(d));
    }

    ArimaModel m;
    m.p = p;
    m.d = d;
    m.fitted = true;
    if (p == 0) return m;  // random walk when d=1; no parameters either way

    const Vec w = d == 1 ? difference(series) : series;
    if (all_equal(w)) {
        // Constant (differenced) series: lag regressors are collinear with
        // the intercept. The exact solution with zero residuals.
        m.coefficients.assign(p, 0.0);
        m.intercept = w.front();
        return m;
    }

    const std::size_t dim = p + 1;  // intercept + p lags
    Matrix xtx(dim, dim);
    Vec xty(dim, 0.0);
    Vec row(dim);
    for (std::size_t t = p; t < w.size(); ++t) {
        row[0] = 1.0;
        for (std::size_t j = 0; j < p; ++j) row[1 + j] = w[t - 1 - j];
        for (std::size_t i = 0; i < dim; ++i) {
            xty[i] += row[i] * w[t];
            for (std::size_t j = 0; j < dim; ++j) xtx(i, j) += row[i] * row[j];
        }
    }
    const Vec beta = solve_linear(xtx, xty);
    m.intercept = beta[0];
    m.coefficients.assign(beta.begin() + 1, beta.end());
    return m;
}

double arima_forecast(const ArimaModel& m, const Vec& history, std::size_t k) {
    if (!m.fitted) throw ConfigError("arima_forecast: model not fitted");
    if (history.size() < m.p + m.d) {
        throw InputError("arima_forecast: history of length " + std::to_string(history.size()) +
                         " too short, need " + std::to_string(m.p + m.d));
    }
    if (history.empty()) throw InputError("arima_forecast: empty history");
    if (k == 0) return history.back();

    // Work on the differenced tail; only the last p values matter.
    Vec w = m.d == 1 ? difference(history) : history;
    double level = history.back();
    for (std::size_t step = 0; step < k; ++step) {
        double next = m.intercept;
        for (std::size_t j = 0; j < m.p; ++j) next += m.coefficients[j] * w[w.size() - 1 - j];
        w.push_back(next);
        if (m.d == 1) level += next;
    }
    return m.d == 1 ? level : w.back();
}

SvrModel svr_fit(const pipeline::WindowSet& ws, double epsilon, double c, std::size_t epochs,
                 std::uint64_t seed) {
    if (ws.size() == 0) throw InputError("svr_fit: empty training windows");
    if (epsilon < 0.0) throw ConfigError("svr_fit: epsilon must be non-negative");
    if (c < 0.0) throw ConfigError("svr_fit: c must be non-negative");

    const std::size_t dim = ws.window_len;
    const auto n = static_cast<double>(ws.size());

    SvrModel m;
    m.epsilon = epsilon;
    m.c = c;
    m.fitted = true;
    SeededRng rng(seed);
    m.weights.resize(dim);
    for (double& w : m.weights) w = rng.uniform(-0.1, 0.1);
    m.bias = 0.0;

    // Full-batch subgradient steps on a decaying base schedule. The hinge
    // term is nonsmooth, so a fixed step can overshoot a kink and raise
    // the objective; each epoch therefore halves its step until the move
    // is non-increasing (or gives up and keeps the current point). The
    // whole procedure stays deterministic in the seed.
    const double eta0 = 0.5 / (1.0 + 0.01 * c * n);
    Vec grad_w(dim);
    double obj = svr_objective(m, ws);
    for (std::size_t t = 1; t <= epochs; ++t) {
        for (std::size_t j = 0; j < dim; ++j) grad_w[j] = m.weights[j];  // ridge term
        double grad_b = 0.0;
        for (std::size_t i = 0; i < ws.size(); ++i) {
            double r = m.bias - ws.targets[i];
            const Vec& x = ws.inputs[i];
            for (std::size_t j = 0; j < dim; ++j) r += m.weights[j] * x[j];
            if (std::abs(r) <= epsilon) continue;
            const double sign = r > 0.0 ? 1.0 : -1.0;
            for (std::size_t j = 0; j < dim; ++j) grad_w[j] += c * sign * x[j];
            grad_b += c * sign;
        }

        double eta = eta0 / (1.0 + 0.05 * static_cast<double>(t - 1));
        for (int attempt = 0; attempt < 40; ++attempt) {
            SvrModel trial = m;
            for (std::size_t j = 0; j < dim; ++j) trial.weights[j] -= eta * grad_w[j];
            trial.bias -= eta * grad_b;
            const double trial_obj = svr_objective(trial, ws);
            if (trial_obj <= obj) {
                m.weights = std::move(trial.weights);
                m.bias = trial.bias;
                obj = trial_obj;
                break;
            }
            eta *= 0.5;
        }
    }
    return m;
}

double svr_predict(const SvrModel& m, const Vec& window) {
    if (!m.fitted) throw ConfigError("svr_predict: model not fitted");
    if (window.size() != m.weights.size()) {
        throw ShapeError("svr_predict: window length " + std::to_string(window.size()) +
                         " does not match " + std::to_string(m.weights.size()) + " weights");
    }
    double y = m.bias;
    for (std::size_t j = 0; j < window.size(); ++j) y += m.weights[j] * window[j];
    return y;
}

double svr_objective(const SvrModel& m, const pipeline::WindowSet& ws) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const double r = svr_predict(m, ws.inputs[i]) - ws.targets[i];
        hinge += std::max(0.0, std::abs(r) - m.epsilon);
    }
    double ridge = 0.0;
    for (double w : m.weights) ridge += w * w;
    return m.c * hinge + 0.5 * ridge;
}

double naive_forecast(const Vec& window, std::size_t) {
    if (window.empty()) throw InputError("naive_forecast: empty window");
    return window.back();
}

Vec arima_predict_all(const ArimaModel& m, const pipeline::WindowSet& test) {
    Vec out;
    out.reserve(test.size());
    Vec history(test.window_len);
    for (const Vec& window : test.inputs) {
        for (std::size_t j = 0; j < window.size(); ++j) history[j] = test.scaler.invert(window[j]);
        out.push_back(arima_forecast(m, history, test.horizon_steps));
    }
    return out;
}

Vec svr_predict_all(const SvrModel& m, const pipeline::WindowSet& test) {
    Vec out;
    out.reserve(test.size());
    for (const Vec& window : test.inputs) {
        out.push_back(test.scaler.invert(svr_predict(m, window)));
    }
    return out;
}

Vec naive_predict_all(const pipeline::WindowSet& test) {
    Vec out;
    out.reserve(test.size());
    for (const Vec& window : test.inputs) {
        out.push_back(test.scaler.invert(naive_forecast(window, test.horizon_steps)));
    }
    return out;
}

}  // namespace glucast::baselines
