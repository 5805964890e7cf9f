#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/prediction.hpp"
#include "injury/table.hpp"

namespace injury {

struct LogitParams {
    double l2 = 0.01;
    int max_iter = 5000;
    double tol = 1e-6;  // on the gradient norm

    void validate() const;
};

/// Logistic model over internally standardized features.
class LinearModel {
public:
    LinearModel() = default;
    LinearModel(std::vector<std::string> names, std::vector<double> mean, std::vector<double> scale,
                std::vector<double> weights, double bias);

    const std::vector<std::string>& feature_names() const { return names_; }
    const std::vector<double>& weights() const { return w_; }
    double bias() const { return b_; }
    int iterations() const { return iterations_; }
    double gradient_norm() const { return grad_norm_; }

    double decision(std::span<const double> x) const;
    Prediction predict(std::span<const double> x) const;
    Predictions predict_table(const TrainingTable& table) const;

    nlohmann::json to_json() const;
    static LinearModel from_json(const nlohmann::json& j);

private:
    friend LinearModel fit_logit(const TrainingTable&, const LogitParams&, std::uint64_t);
    std::vector<std::string> names_;
    std::vector<double> mean_, scale_, w_;
    double b_ = 0.0;
    int iterations_ = 0;
    double grad_norm_ = 0.0;
};

double sigmoid(double z);

/// Regularized mean log-loss on a row-major design `x` (n x p) with labels `y`:
/// mean(-y log s - (1-y) log(1-s)) + l2/2 * |w|^2, s = sigmoid(w.x + b). `theta` = (w, b).
double logit_loss(std::span<const double> x, std::span<const std::uint8_t> y, std::size_t p,
                  std::span<const double> theta, double l2);
/// Gradient of logit_loss with respect to theta, written to `grad` (size p + 1).
void logit_gradient(std::span<const double> x, std::span<const std::uint8_t> y, std::size_t p,
                    std::span<const double> theta, double l2, std::span<double> grad);

/// Accelerated gradient descent from zero weights. Throws Error(EmptyTable) and
/// Error(NonConvergence) when the gradient norm stays above tol after max_iter steps.
LinearModel fit_logit(const TrainingTable& table, const LogitParams& params, std::uint64_t seed = 0);

}  // namespace injury
