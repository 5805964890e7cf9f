#include "injury/logit.hpp"

#include <algorithm>
#include <cmath>

#include "injury/error.hpp"
#include "injury/kernels.hpp"

namespace injury {

void LogitParams::validate() const {
    if (!(l2 >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "l2 must be >= 0");
    if (max_iter < 1) throw Error(ErrorKind::ConfigInvalid, "max_iter must be >= 1");
    if (!(tol > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tol must be > 0");
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logit_loss(std::span<const double> x, std::span<const std::uint8_t> y, std::size_t p,
                  std::span<const double> theta, double l2) {
    const std::size_t n = y.size();
    const auto w = theta.first(p);
    const double b = theta[p];
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = kernels::dot(x.subspan(i * p, p), w) + b;
        loss += y[i] ? softplus(-z) : softplus(z);
    }
    return loss / double(n) + 0.5 * l2 * kernels::dot(w, w);
}

void logit_gradient(std::span<const double> x, std::span<const std::uint8_t> y, std::size_t p,
                    std::span<const double> theta, double l2, std::span<double> grad) {
    const std::size_t n = y.size();
    const auto w = theta.first(p);
    std::fill(grad.begin(), grad.end(), 0.0);
    auto gw = grad.first(p);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.subspan(i * p, p);
        const double r = sigmoid(kernels::dot(xi, w) + theta[p]) - double(y[i]);
        kernels::axpy(r, xi, gw);
        gb += r;
    }
    const double inv = 1.0 / double(n);
    for (std::size_t j = 0; j < p; ++j) gw[j] = gw[j] * inv + l2 * w[j];
    grad[p] = gb * inv;
}

LinearModel::LinearModel(std::vector<std::string> names, std::vector<double> mean, std::vector<double> scale,
                         std::vector<double> weights, double bias)
    : names_(std::move(names)), mean_(std::move(mean)), scale_(std::move(scale)), w_(std::move(weights)), b_(bias) {
    if (mean_.size() != names_.size() || scale_.size() != names_.size() || w_.size() != names_.size())
        throw Error(ErrorKind::InvalidArgument, "linear model vectors differ in length");
}

double LinearModel::decision(std::span<const double> x) const {
    double z = b_;
    for (std::size_t j = 0; j < w_.size(); ++j) z += w_[j] * (x[j] - mean_[j]) / scale_[j];
    return z;
}

Prediction LinearModel::predict(std::span<const double> x) const {
    const double s = sigmoid(decision(x));
    return {std::uint8_t(s >= 0.5 ? 1 : 0), s};
}

Predictions LinearModel::predict_table(const TrainingTable& table) const {
    std::vector<std::size_t> idx(names_.size());
    for (std::size_t f = 0; f < names_.size(); ++f) idx[f] = table.require_column(names_[f]);
    Predictions out;
    std::vector<double> x(names_.size());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto row = table.row(i);
        for (std::size_t f = 0; f < idx.size(); ++f) x[f] = row[idx[f]];
        out.push_back(predict(x));
    }
    return out;
}

nlohmann::json LinearModel::to_json() const {
    return {{"type", "logistic_regression"}, {"feature_names", names_}, {"mean", mean_}, {"scale", scale_},
            {"weights", w_}, {"bias", b_}, {"iterations", iterations_}, {"gradient_norm", grad_norm_}};
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
    try {
        if (j.value("type", "") != "logistic_regression")
            throw Error(ErrorKind::InvalidArgument, "not a logistic_regression document");
        LinearModel m(j.at("feature_names").get<std::vector<std::string>>(), j.at("mean").get<std::vector<double>>(),
                      j.at("scale").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>(),
                      j.at("bias").get<double>());
        m.iterations_ = j.value("iterations", 0);
        m.grad_norm_ = j.value("gradient_norm", 0.0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed logit JSON: ") + e.what());
    }
}

LinearModel fit_logit(const TrainingTable& table, const LogitParams& params, std::uint64_t /*seed*/) {
    params.validate();
    if (table.empty() || table.cols() == 0) throw Error(ErrorKind::EmptyTable, "cannot fit logit on an empty table");
    const std::size_t n = table.rows(), p = table.cols();
    std::vector<double> mean(p, 0.0), scale(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += table.at(i, j);
    for (auto& m : mean) m /= double(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) scale[j] += (table.at(i, j) - mean[j]) * (table.at(i, j) - mean[j]);
    for (auto& s : scale) {
        s = std::sqrt(s / double(n));
        if (!(s > 1e-12)) s = 1.0;
    }
    std::vector<double> x(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x[i * p + j] = (table.at(i, j) - mean[j]) / scale[j];
    const auto& y = table.labels();

    // Nesterov momentum with backtracking line search and gradient-based restart.
    const std::size_t d = p + 1;
    std::vector<double> theta(d, 0.0), prev(d, 0.0), look(d), g(d), next(d), gnext(d);
    double step = 1.0, t = 1.0;
    double gnorm = 0.0;
    int it = 0;
    for (; it < params.max_iter; ++it) {
        logit_gradient(x, y, p, theta, params.l2, g);
        gnorm = std::sqrt(kernels::dot(g, g));
        if (gnorm < params.tol) break;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        for (std::size_t k = 0; k < d; ++k) look[k] = theta[k] + beta * (theta[k] - prev[k]);
        logit_gradient(x, y, p, look, params.l2, g);
        const double f_look = logit_loss(x, y, p, look, params.l2);
        const double gg = kernels::dot(g, g);
        for (;;) {
            for (std::size_t k = 0; k < d; ++k) next[k] = look[k] - step * g[k];
            if (logit_loss(x, y, p, next, params.l2) <= f_look - 0.5 * step * gg || step < 1e-12) break;
            step *= 0.5;
        }
        // restart momentum when it points uphill
        double uphill = 0.0;
        for (std::size_t k = 0; k < d; ++k) uphill += g[k] * (next[k] - theta[k]);
        prev = theta;
        theta = next;
        t = uphill > 0.0 ? 1.0 : t_next;
        step *= 1.25;
    }
    if (gnorm >= params.tol)
        throw Error(ErrorKind::NonConvergence, "logit did not converge after " + std::to_string(it) +
                                                   " iterations (gradient norm " + std::to_string(gnorm) + ")");
    LinearModel m(table.feature_names(), std::move(mean), std::move(scale), std::vector<double>(theta.begin(), theta.begin() + std::ptrdiff_t(p)),
                  theta[p]);
    m.iterations_ = it;
    m.grad_norm_ = gnorm;
    return m;
}

}  // namespace injury
