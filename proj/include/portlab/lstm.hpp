#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "portlab/prng.hpp"

namespace portlab {

struct LSTMConfig {
    int lookback = 50;
    int hidden_units = 256;
    int recurrent_layers = 2;
    int dense_units = 256;
    int horizon = 1;
    int batch_size = 64;
    int epochs = 100;
    double dropout_rate = 0.30;
    double learning_rate = 1e-3;
    double huber_delta = 1.0;
    double validation_split = 0.10;  // chronological tail; 0 disables
    std::uint64_t seed = 0;

    void validate() const;
};

/// Affine map of raw prices onto [0, 1] over the training range. The output
/// sigmoid bounds raw predictions to (0, 1), so price targets must live there
/// too. Values outside the fitted range map outside [0, 1] without clamping.
struct MinMaxScaler {
    double min_price = 0.0;
    double max_price = 1.0;

    double apply(double price) const { return (price - min_price) / (max_price - min_price); }
    double invert(double scaled) const { return min_price + scaled * (max_price - min_price); }
};

/// Throws DataError unless the span holds >= 2 distinct values.
MinMaxScaler fit_scaler(std::span<const double> prices);

struct WindowSample {
    Eigen::VectorXd input;  // lookback values
    double target = 0.0;
};

/// Sliding windows: sample i covers prices[i .. i+lookback) with target
/// prices[i + lookback + horizon - 1]; yields len - lookback - horizon + 1
/// samples.
std::vector<WindowSample> make_windows(std::span<const double> series, int lookback,
                                       int horizon);

struct LSTMLayerParams {
    Eigen::MatrixXd w_i, w_f, w_g, w_o;  // hidden x input
    Eigen::MatrixXd u_i, u_f, u_g, u_o;  // hidden x hidden
    Eigen::VectorXd b_i, b_f, b_g, b_o;  // hidden
};

struct LSTMParameters {
    std::vector<LSTMLayerParams> layers;
    Eigen::MatrixXd dense_w;  // dense x hidden
    Eigen::VectorXd dense_b;  // dense
    Eigen::VectorXd out_w;    // dense
    Eigen::VectorXd out_b;    // 1

    static LSTMParameters zeros(const LSTMConfig& config);
};

/// Flat view of one parameter tensor; used by the optimizer, checkpointing,
/// and finite-difference checks. Enumeration order is fixed.
struct TensorRef {
    std::string name;
    double* data = nullptr;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;

    Eigen::Index size() const { return rows * cols; }
};

std::vector<TensorRef> tensor_refs(LSTMParameters& params);

struct LSTMModel {
    LSTMConfig config;
    MinMaxScaler scaler;
    LSTMParameters params;

    std::size_t parameter_count() const;
};

/// Seeded uniform(-s, s) initialization with s = 1/sqrt(fan_in) per tensor.
LSTMModel init_model(const LSTMConfig& config);

/// Run the network on one scaled window. Layers below the top one emit full
/// sequences; the top recurrent layer emits its final hidden state. Dropout
/// (inverted scaling) applies only in training mode and consumes `rng`.
double forward(const LSTMModel& model, const Eigen::VectorXd& scaled_window,
               bool training_mode = false, SplitMix64* rng = nullptr);

/// Huber loss of one scaled sample plus analytic parameter gradients
/// (accumulated into `grads`). Returns the loss.
double sample_loss_gradients(const LSTMModel& model, const Eigen::VectorXd& scaled_window,
                             double scaled_target, LSTMParameters& grads,
                             bool training_mode = false, SplitMix64* rng = nullptr);

double huber_loss(double residual, double delta);
double huber_gradient(double residual, double delta);

struct TrainingReport {
    std::vector<double> train_loss;  // per epoch, Huber on scaled values
    std::vector<double> train_mae;   // per epoch, scaled values
    std::optional<double> val_loss;
    std::optional<double> val_mae;
};

/// Fit the scaler on the training slice, build windows, and run minibatch
/// Adam on the Huber loss. Deterministic for fixed (series, config).
std::pair<LSTMModel, TrainingReport> train(std::span<const double> series,
                                           const LSTMConfig& config);

/// Scale the most recent `lookback` closes, run inference, unscale.
double predict_next(const LSTMModel& model, std::span<const double> recent);

void save_checkpoint(const LSTMModel& model, const std::filesystem::path& path);
LSTMModel load_checkpoint(const std::filesystem::path& path);

/// One axis of a hyperparameter sweep: config field name plus candidate
/// values (integer fields take the rounded value).
struct SweepAxis {
    std::string field;
    std::vector<double> values;
};

/// Cartesian product of the axes applied over `base`, in axis order.
std::vector<LSTMConfig> sweep_grid(const LSTMConfig& base, const std::vector<SweepAxis>& axes);

}  // namespace portlab
