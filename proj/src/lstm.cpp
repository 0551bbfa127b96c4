#include "portlab/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "portlab/errors.hpp"

namespace portlab {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& x) {
    return x.unaryExpr([](double v) { return std::tanh(v); });
}

int layer_input_size(const LSTMConfig& config, int layer) {
    return layer == 0 ? 1 : config.hidden_units;
}

struct LayerTrace {
    std::vector<Eigen::VectorXd> x;  // input per step
    std::vector<Eigen::VectorXd> gate_i, gate_f, gate_g, gate_o;
    std::vector<Eigen::VectorXd> cell, tanh_cell, hidden;
    Eigen::MatrixXd mask;  // dropout mask incl. 1/(1-p) scaling; cols = masked steps
    bool sequence_output = false;
};

struct ForwardTrace {
    std::vector<LayerTrace> layers;
    Eigen::VectorXd dense_input;  // top layer's final state after dropout
    Eigen::VectorXd z_dense, a_dense;
    double z_out = 0.0;
    double output = 0.0;
};

Eigen::MatrixXd draw_mask(Eigen::Index rows, Eigen::Index cols, double rate, bool training,
                          SplitMix64* rng) {
    Eigen::MatrixXd mask(rows, cols);
    if (!training || rate <= 0.0) {
        mask.setOnes();
        return mask;
    }
    if (rng == nullptr)
        throw std::invalid_argument("forward: training-mode dropout needs an RNG");
    const double scale = 1.0 / (1.0 - rate);
    for (Eigen::Index t = 0; t < cols; ++t)
        for (Eigen::Index u = 0; u < rows; ++u)
            mask(u, t) = rng->next_double() < rate ? 0.0 : scale;
    return mask;
}

ForwardTrace run_forward(const LSTMModel& model, const Eigen::VectorXd& window, bool training,
                         SplitMix64* rng) {
    const LSTMConfig& cfg = model.config;
    if (window.size() != cfg.lookback)
        throw std::invalid_argument("forward: window length " + std::to_string(window.size()) +
                                    " does not match lookback " + std::to_string(cfg.lookback));

    const int steps = cfg.lookback;
    const int h = cfg.hidden_units;
    ForwardTrace trace;
    trace.layers.resize(static_cast<std::size_t>(cfg.recurrent_layers));

    std::vector<Eigen::VectorXd> inputs(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        inputs[static_cast<std::size_t>(t)].resize(1);
        inputs[static_cast<std::size_t>(t)](0) = window(t);
    }

    for (int layer = 0; layer < cfg.recurrent_layers; ++layer) {
        const LSTMLayerParams& p = model.params.layers[static_cast<std::size_t>(layer)];
        LayerTrace& lt = trace.layers[static_cast<std::size_t>(layer)];
        lt.sequence_output = layer + 1 < cfg.recurrent_layers;
        lt.x = std::move(inputs);
        lt.gate_i.resize(static_cast<std::size_t>(steps));
        lt.gate_f.resize(static_cast<std::size_t>(steps));
        lt.gate_g.resize(static_cast<std::size_t>(steps));
        lt.gate_o.resize(static_cast<std::size_t>(steps));
        lt.cell.resize(static_cast<std::size_t>(steps));
        lt.tanh_cell.resize(static_cast<std::size_t>(steps));
        lt.hidden.resize(static_cast<std::size_t>(steps));

        Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
        Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
        for (int t = 0; t < steps; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            const Eigen::VectorXd& x = lt.x[ti];
            lt.gate_i[ti] = sigmoid(p.w_i * x + p.u_i * h_prev + p.b_i);
            lt.gate_f[ti] = sigmoid(p.w_f * x + p.u_f * h_prev + p.b_f);
            lt.gate_g[ti] = tanh_vec(p.w_g * x + p.u_g * h_prev + p.b_g);
            lt.gate_o[ti] = sigmoid(p.w_o * x + p.u_o * h_prev + p.b_o);
            lt.cell[ti] =
                lt.gate_f[ti].cwiseProduct(c_prev) + lt.gate_i[ti].cwiseProduct(lt.gate_g[ti]);
            lt.tanh_cell[ti] = tanh_vec(lt.cell[ti]);
            lt.hidden[ti] = lt.gate_o[ti].cwiseProduct(lt.tanh_cell[ti]);
            h_prev = lt.hidden[ti];
            c_prev = lt.cell[ti];
        }

        if (lt.sequence_output) {
            lt.mask = draw_mask(h, steps, cfg.dropout_rate, training, rng);
            inputs.assign(static_cast<std::size_t>(steps), Eigen::VectorXd());
            for (int t = 0; t < steps; ++t)
                inputs[static_cast<std::size_t>(t)] =
                    lt.hidden[static_cast<std::size_t>(t)].cwiseProduct(lt.mask.col(t));
        } else {
            lt.mask = draw_mask(h, 1, cfg.dropout_rate, training, rng);
            trace.dense_input =
                lt.hidden[static_cast<std::size_t>(steps - 1)].cwiseProduct(lt.mask.col(0));
        }
    }

    trace.z_dense = model.params.dense_w * trace.dense_input + model.params.dense_b;
    trace.a_dense = trace.z_dense.cwiseMax(0.0);
    trace.z_out = model.params.out_w.dot(trace.a_dense) + model.params.out_b(0);
    trace.output = sigmoid(trace.z_out);
    return trace;
}

/// Backpropagate d(loss)/d(output) through the trace, accumulating into grads.
void backpropagate(const LSTMModel& model, const ForwardTrace& trace, double d_output,
                   LSTMParameters& grads) {
    const LSTMConfig& cfg = model.config;
    const int steps = cfg.lookback;

    const double y = trace.output;
    const double dz_out = d_output * y * (1.0 - y);
    grads.out_w += dz_out * trace.a_dense;
    grads.out_b(0) += dz_out;

    Eigen::VectorXd da_dense = model.params.out_w * dz_out;
    Eigen::VectorXd dz_dense =
        (trace.z_dense.array() > 0.0).select(da_dense, Eigen::VectorXd::Zero(da_dense.size()));
    grads.dense_w += dz_dense * trace.dense_input.transpose();
    grads.dense_b += dz_dense;

    // Gradient with respect to each layer's output sequence; only the final
    // step of the top layer receives a direct contribution.
    Eigen::MatrixXd d_hidden_seq = Eigen::MatrixXd::Zero(cfg.hidden_units, steps);
    {
        const LayerTrace& top = trace.layers.back();
        Eigen::VectorXd d_dense_input = model.params.dense_w.transpose() * dz_dense;
        d_hidden_seq.col(steps - 1) = d_dense_input.cwiseProduct(top.mask.col(0));
    }

    for (int layer = cfg.recurrent_layers - 1; layer >= 0; --layer) {
        const LSTMLayerParams& p = model.params.layers[static_cast<std::size_t>(layer)];
        const LayerTrace& lt = trace.layers[static_cast<std::size_t>(layer)];
        LSTMLayerParams& g = grads.layers[static_cast<std::size_t>(layer)];

        const Eigen::Index in = p.w_i.cols();
        Eigen::MatrixXd d_input_seq = Eigen::MatrixXd::Zero(in, steps);
        Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(cfg.hidden_units);
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(cfg.hidden_units);

        for (int t = steps - 1; t >= 0; --t) {
            const auto ti = static_cast<std::size_t>(t);
            const Eigen::VectorXd dh = d_hidden_seq.col(t) + dh_carry;

            dc += dh.cwiseProduct(lt.gate_o[ti])
                      .cwiseProduct(Eigen::VectorXd::Ones(cfg.hidden_units) -
                                    lt.tanh_cell[ti].cwiseProduct(lt.tanh_cell[ti]));

            const Eigen::VectorXd d_o = dh.cwiseProduct(lt.tanh_cell[ti]);
            const Eigen::VectorXd da_o = d_o.cwiseProduct(lt.gate_o[ti])
                                             .cwiseProduct(Eigen::VectorXd::Ones(
                                                               cfg.hidden_units) -
                                                           lt.gate_o[ti]);
            const Eigen::VectorXd c_prev =
                t > 0 ? lt.cell[ti - 1] : Eigen::VectorXd::Zero(cfg.hidden_units);
            const Eigen::VectorXd d_f = dc.cwiseProduct(c_prev);
            const Eigen::VectorXd da_f = d_f.cwiseProduct(lt.gate_f[ti])
                                             .cwiseProduct(Eigen::VectorXd::Ones(
                                                               cfg.hidden_units) -
                                                           lt.gate_f[ti]);
            const Eigen::VectorXd d_i = dc.cwiseProduct(lt.gate_g[ti]);
            const Eigen::VectorXd da_i = d_i.cwiseProduct(lt.gate_i[ti])
                                             .cwiseProduct(Eigen::VectorXd::Ones(
                                                               cfg.hidden_units) -
                                                           lt.gate_i[ti]);
            const Eigen::VectorXd d_g = dc.cwiseProduct(lt.gate_i[ti]);
            const Eigen::VectorXd da_g = d_g.cwiseProduct(
                Eigen::VectorXd::Ones(cfg.hidden_units) -
                lt.gate_g[ti].cwiseProduct(lt.gate_g[ti]));

            const Eigen::VectorXd h_prev =
                t > 0 ? lt.hidden[ti - 1] : Eigen::VectorXd::Zero(cfg.hidden_units);

            g.w_i += da_i * lt.x[ti].transpose();
            g.w_f += da_f * lt.x[ti].transpose();
            g.w_g += da_g * lt.x[ti].transpose();
            g.w_o += da_o * lt.x[ti].transpose();
            g.u_i += da_i * h_prev.transpose();
            g.u_f += da_f * h_prev.transpose();
            g.u_g += da_g * h_prev.transpose();
            g.u_o += da_o * h_prev.transpose();
            g.b_i += da_i;
            g.b_f += da_f;
            g.b_g += da_g;
            g.b_o += da_o;

            d_input_seq.col(t) = p.w_i.transpose() * da_i + p.w_f.transpose() * da_f +
                                 p.w_g.transpose() * da_g + p.w_o.transpose() * da_o;
            dh_carry = p.u_i.transpose() * da_i + p.u_f.transpose() * da_f +
                       p.u_g.transpose() * da_g + p.u_o.transpose() * da_o;
            dc = dc.cwiseProduct(lt.gate_f[ti]);
        }

        if (layer > 0) {
            // d_input_seq is the gradient at the lower layer's masked output.
            const LayerTrace& below = trace.layers[static_cast<std::size_t>(layer - 1)];
            d_hidden_seq = d_input_seq.cwiseProduct(below.mask);
        }
    }
}

struct AdamState {
    LSTMParameters m;
    LSTMParameters v;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
};

void adam_update(LSTMParameters& params, LSTMParameters& grads, AdamState& state,
                 double learning_rate) {
    ++state.step;
    const double bias1 = 1.0 - std::pow(state.beta1, state.step);
    const double bias2 = 1.0 - std::pow(state.beta2, state.step);

    auto p = tensor_refs(params);
    auto g = tensor_refs(grads);
    auto m = tensor_refs(state.m);
    auto v = tensor_refs(state.v);
    for (std::size_t t = 0; t < p.size(); ++t) {
        for (Eigen::Index k = 0; k < p[t].size(); ++k) {
            const double grad = g[t].data[k];
            m[t].data[k] = state.beta1 * m[t].data[k] + (1.0 - state.beta1) * grad;
            v[t].data[k] = state.beta2 * v[t].data[k] + (1.0 - state.beta2) * grad * grad;
            const double m_hat = m[t].data[k] / bias1;
            const double v_hat = v[t].data[k] / bias2;
            p[t].data[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

}  // namespace

void LSTMConfig::validate() const {
    if (lookback < 1) throw std::invalid_argument("lstm config: lookback must be >= 1");
    if (horizon < 1) throw std::invalid_argument("lstm config: horizon must be >= 1");
    if (hidden_units < 1) throw std::invalid_argument("lstm config: hidden_units must be >= 1");
    if (recurrent_layers < 1)
        throw std::invalid_argument("lstm config: recurrent_layers must be >= 1");
    if (dense_units < 1) throw std::invalid_argument("lstm config: dense_units must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("lstm config: batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("lstm config: epochs must be >= 0");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw std::invalid_argument("lstm config: dropout_rate must be in [0, 1)");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("lstm config: learning_rate must be > 0");
    if (!(huber_delta > 0.0)) throw std::invalid_argument("lstm config: huber_delta must be > 0");
    if (validation_split < 0.0 || validation_split >= 1.0)
        throw std::invalid_argument("lstm config: validation_split must be in [0, 1)");
}

MinMaxScaler fit_scaler(std::span<const double> prices) {
    if (prices.size() < 2) throw DataError("fit_scaler: need at least 2 prices");
    const auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
    if (!(*hi > *lo))
        throw DataError("fit_scaler: price range is degenerate (all values equal " +
                        std::to_string(*lo) + ")");
    return MinMaxScaler{*lo, *hi};
}

std::vector<WindowSample> make_windows(std::span<const double> series, int lookback,
                                       int horizon) {
    if (lookback < 1 || horizon < 1)
        throw std::invalid_argument("make_windows: lookback and horizon must be >= 1");
    const std::size_t need = static_cast<std::size_t>(lookback) +
                             static_cast<std::size_t>(horizon);
    if (series.size() < need)
        throw DataError("make_windows: series length " + std::to_string(series.size()) +
                        " is shorter than lookback+horizon = " + std::to_string(need));

    const std::size_t count = series.size() - need + 1;
    std::vector<WindowSample> samples(count);
    for (std::size_t i = 0; i < count; ++i) {
        samples[i].input.resize(lookback);
        for (int j = 0; j < lookback; ++j)
            samples[i].input(j) = series[i + static_cast<std::size_t>(j)];
        samples[i].target = series[i + need - 1];
    }
    return samples;
}

LSTMParameters LSTMParameters::zeros(const LSTMConfig& config) {
    LSTMParameters params;
    params.layers.resize(static_cast<std::size_t>(config.recurrent_layers));
    const int h = config.hidden_units;
    for (int layer = 0; layer < config.recurrent_layers; ++layer) {
        const int in = layer_input_size(config, layer);
        LSTMLayerParams& p = params.layers[static_cast<std::size_t>(layer)];
        for (auto* w : {&p.w_i, &p.w_f, &p.w_g, &p.w_o}) w->setZero(h, in);
        for (auto* u : {&p.u_i, &p.u_f, &p.u_g, &p.u_o}) u->setZero(h, h);
        for (auto* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o}) b->setZero(h);
    }
    params.dense_w.setZero(config.dense_units, h);
    params.dense_b.setZero(config.dense_units);
    params.out_w.setZero(config.dense_units);
    params.out_b.setZero(1);
    return params;
}

std::vector<TensorRef> tensor_refs(LSTMParameters& params) {
    std::vector<TensorRef> refs;
    for (std::size_t layer = 0; layer < params.layers.size(); ++layer) {
        LSTMLayerParams& p = params.layers[layer];
        const std::string prefix = "layer" + std::to_string(layer) + ".";
        const std::pair<const char*, Eigen::MatrixXd*> mats[] = {
            {"w_i", &p.w_i}, {"w_f", &p.w_f}, {"w_g", &p.w_g}, {"w_o", &p.w_o},
            {"u_i", &p.u_i}, {"u_f", &p.u_f}, {"u_g", &p.u_g}, {"u_o", &p.u_o}};
        for (const auto& [name, mat] : mats)
            refs.push_back({prefix + name, mat->data(), mat->rows(), mat->cols()});
        const std::pair<const char*, Eigen::VectorXd*> vecs[] = {
            {"b_i", &p.b_i}, {"b_f", &p.b_f}, {"b_g", &p.b_g}, {"b_o", &p.b_o}};
        for (const auto& [name, vec] : vecs)
            refs.push_back({prefix + name, vec->data(), vec->size(), 1});
    }
    refs.push_back({"dense.w", params.dense_w.data(), params.dense_w.rows(),
                    params.dense_w.cols()});
    refs.push_back({"dense.b", params.dense_b.data(), params.dense_b.size(), 1});
    refs.push_back({"output.w", params.out_w.data(), params.out_w.size(), 1});
    refs.push_back({"output.b", params.out_b.data(), 1, 1});
    return refs;
}

std::size_t LSTMModel::parameter_count() const {
    std::size_t count = 0;
    auto refs = tensor_refs(const_cast<LSTMParameters&>(params));
    for (const auto& ref : refs) count += static_cast<std::size_t>(ref.size());
    return count;
}

LSTMModel init_model(const LSTMConfig& config) {
    config.validate();
    LSTMModel model;
    model.config = config;
    model.params = LSTMParameters::zeros(config);

    SplitMix64 rng = SplitMix64::substream(config.seed, 0x1A17u);
    auto fill = [&rng](Eigen::MatrixXd& m, double scale) {
        for (Eigen::Index k = 0; k < m.size(); ++k)
            m.data()[k] = rng.next_uniform(-scale, scale);
    };
    auto fill_vec = [&rng](Eigen::VectorXd& v, double scale) {
        for (Eigen::Index k = 0; k < v.size(); ++k)
            v(k) = rng.next_uniform(-scale, scale);
    };

    const int h = config.hidden_units;
    for (int layer = 0; layer < config.recurrent_layers; ++layer) {
        const int in = layer_input_size(config, layer);
        const double s_in = 1.0 / std::sqrt(static_cast<double>(in));
        const double s_h = 1.0 / std::sqrt(static_cast<double>(h));
        LSTMLayerParams& p = model.params.layers[static_cast<std::size_t>(layer)];
        for (auto* w : {&p.w_i, &p.w_f, &p.w_g, &p.w_o}) fill(*w, s_in);
        for (auto* u : {&p.u_i, &p.u_f, &p.u_g, &p.u_o}) fill(*u, s_h);
        for (auto* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o}) fill_vec(*b, s_h);
    }
    const double s_dense = 1.0 / std::sqrt(static_cast<double>(h));
    const double s_out = 1.0 / std::sqrt(static_cast<double>(config.dense_units));
    fill(model.params.dense_w, s_dense);
    fill_vec(model.params.dense_b, s_dense);
    fill_vec(model.params.out_w, s_out);
    fill_vec(model.params.out_b, s_out);
    return model;
}

double forward(const LSTMModel& model, const Eigen::VectorXd& scaled_window, bool training_mode,
               SplitMix64* rng) {
    return run_forward(model, scaled_window, training_mode, rng).output;
}

double huber_loss(double residual, double delta) {
    const double a = std::abs(residual);
    return a <= delta ? 0.5 * residual * residual : delta * (a - 0.5 * delta);
}

double huber_gradient(double residual, double delta) {
    if (std::abs(residual) <= delta) return residual;
    return residual > 0.0 ? delta : -delta;
}

double sample_loss_gradients(const LSTMModel& model, const Eigen::VectorXd& scaled_window,
                             double scaled_target, LSTMParameters& grads, bool training_mode,
                             SplitMix64* rng) {
    const ForwardTrace trace = run_forward(model, scaled_window, training_mode, rng);
    const double residual = trace.output - scaled_target;
    backpropagate(model, trace, huber_gradient(residual, model.config.huber_delta), grads);
    return huber_loss(residual, model.config.huber_delta);
}

std::pair<LSTMModel, TrainingReport> train(std::span<const double> series,
                                           const LSTMConfig& config) {
    config.validate();
    const std::size_t min_len = static_cast<std::size_t>(config.lookback) +
                                static_cast<std::size_t>(config.horizon) + 1;
    if (series.size() < min_len)
        throw DataError("train: series length " + std::to_string(series.size()) +
                        " is shorter than lookback+horizon+1 = " + std::to_string(min_len));

    // Chronological split: the scaler and the training windows never see the
    // validation tail.
    std::size_t train_len = series.size();
    if (config.validation_split > 0.0) {
        const auto head = static_cast<std::size_t>(
            std::llround(static_cast<double>(series.size()) * (1.0 - config.validation_split)));
        if (head >= min_len) train_len = head;
    }

    LSTMModel model = init_model(config);
    model.scaler = fit_scaler(series.subspan(0, train_len));

    std::vector<double> scaled(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) scaled[i] = model.scaler.apply(series[i]);

    std::vector<WindowSample> train_set =
        make_windows(std::span<const double>(scaled).subspan(0, train_len), config.lookback,
                     config.horizon);
    std::vector<WindowSample> val_set;
    if (train_len < series.size()) {
        const std::size_t val_from = train_len - static_cast<std::size_t>(config.lookback) -
                                     static_cast<std::size_t>(config.horizon) + 1;
        const auto tail = std::span<const double>(scaled).subspan(val_from);
        for (auto& sample : make_windows(tail, config.lookback, config.horizon))
            val_set.push_back(std::move(sample));
    }

    TrainingReport report;
    SplitMix64 train_rng = SplitMix64::substream(config.seed, 0x7124u);
    AdamState adam{LSTMParameters::zeros(config), LSTMParameters::zeros(config)};
    LSTMParameters batch_grads = LSTMParameters::zeros(config);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order, train_rng);
        double loss_sum = 0.0;
        double mae_sum = 0.0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const auto batch_n = static_cast<double>(stop - start);

            for (auto refs = tensor_refs(batch_grads); auto& ref : refs)
                std::fill(ref.data, ref.data + ref.size(), 0.0);

            double batch_loss = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const WindowSample& sample = train_set[order[k]];
                const ForwardTrace trace =
                    run_forward(model, sample.input, config.dropout_rate > 0.0, &train_rng);
                const double residual = trace.output - sample.target;
                batch_loss += huber_loss(residual, config.huber_delta);
                mae_sum += std::abs(residual);
                backpropagate(model, trace,
                              huber_gradient(residual, config.huber_delta) / batch_n,
                              batch_grads);
            }
            if (!std::isfinite(batch_loss))
                throw NumericError("train: loss diverged at epoch " + std::to_string(epoch + 1) +
                                   ", batch " +
                                   std::to_string(start / static_cast<std::size_t>(
                                                              config.batch_size) +
                                                  1));
            loss_sum += batch_loss;
            adam_update(model.params, batch_grads, adam, config.learning_rate);
        }

        report.train_loss.push_back(loss_sum / static_cast<double>(train_set.size()));
        report.train_mae.push_back(mae_sum / static_cast<double>(train_set.size()));
    }

    if (!val_set.empty()) {
        double loss = 0.0;
        double mae = 0.0;
        for (const auto& sample : val_set) {
            const double pred = forward(model, sample.input);
            loss += huber_loss(pred - sample.target, config.huber_delta);
            mae += std::abs(pred - sample.target);
        }
        report.val_loss = loss / static_cast<double>(val_set.size());
        report.val_mae = mae / static_cast<double>(val_set.size());
    }
    return {std::move(model), std::move(report)};
}

double predict_next(const LSTMModel& model, std::span<const double> recent) {
    if (recent.size() != static_cast<std::size_t>(model.config.lookback))
        throw std::invalid_argument("predict_next: expected " +
                                    std::to_string(model.config.lookback) + " prices, got " +
                                    std::to_string(recent.size()));
    Eigen::VectorXd window(model.config.lookback);
    for (std::size_t i = 0; i < recent.size(); ++i)
        window(static_cast<Eigen::Index>(i)) = model.scaler.apply(recent[i]);
    return model.scaler.invert(forward(model, window));
}

void save_checkpoint(const LSTMModel& model, const std::filesystem::path& path) {
    nlohmann::json tensors = nlohmann::json::array();
    auto refs = tensor_refs(const_cast<LSTMParameters&>(model.params));
    for (const auto& ref : refs) {
        nlohmann::json data = nlohmann::json::array();
        // Row-major dump; Eigen stores column-major.
        for (Eigen::Index r = 0; r < ref.rows; ++r)
            for (Eigen::Index c = 0; c < ref.cols; ++c)
                data.push_back(ref.data[c * ref.rows + r]);
        tensors.push_back({{"name", ref.name},
                           {"rows", ref.rows},
                           {"cols", ref.cols},
                           {"data", std::move(data)}});
    }
    const nlohmann::json doc = {
        {"format", "portlab-lstm"},
        {"version", 1},
        {"config",
         {{"lookback", model.config.lookback},
          {"hidden_units", model.config.hidden_units},
          {"recurrent_layers", model.config.recurrent_layers},
          {"dense_units", model.config.dense_units},
          {"horizon", model.config.horizon},
          {"batch_size", model.config.batch_size},
          {"epochs", model.config.epochs},
          {"dropout_rate", model.config.dropout_rate},
          {"learning_rate", model.config.learning_rate},
          {"huber_delta", model.config.huber_delta},
          {"validation_split", model.config.validation_split},
          {"seed", model.config.seed}}},
        {"scaler", {{"min_price", model.scaler.min_price},
                    {"max_price", model.scaler.max_price}}},
        {"tensors", std::move(tensors)}};

    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out << doc.dump(2) << '\n';
}

LSTMModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read checkpoint " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
    if (doc.value("format", "") != "portlab-lstm")
        throw DataError("checkpoint " + path.string() + " has unknown format");

    LSTMModel model;
    const auto& cfg = doc.at("config");
    model.config.lookback = cfg.at("lookback").get<int>();
    model.config.hidden_units = cfg.at("hidden_units").get<int>();
    model.config.recurrent_layers = cfg.at("recurrent_layers").get<int>();
    model.config.dense_units = cfg.at("dense_units").get<int>();
    model.config.horizon = cfg.at("horizon").get<int>();
    model.config.batch_size = cfg.at("batch_size").get<int>();
    model.config.epochs = cfg.at("epochs").get<int>();
    model.config.dropout_rate = cfg.at("dropout_rate").get<double>();
    model.config.learning_rate = cfg.at("learning_rate").get<double>();
    model.config.huber_delta = cfg.at("huber_delta").get<double>();
    model.config.validation_split = cfg.at("validation_split").get<double>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    model.scaler.min_price = doc.at("scaler").at("min_price").get<double>();
    model.scaler.max_price = doc.at("scaler").at("max_price").get<double>();

    model.params = LSTMParameters::zeros(model.config);
    auto refs = tensor_refs(model.params);
    const auto& tensors = doc.at("tensors");
    if (tensors.size() != refs.size())
        throw DataError("checkpoint " + path.string() + " has " +
                        std::to_string(tensors.size()) + " tensors, expected " +
                        std::to_string(refs.size()));
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& tensor = tensors[i];
        if (tensor.at("name").get<std::string>() != refs[i].name ||
            tensor.at("rows").get<Eigen::Index>() != refs[i].rows ||
            tensor.at("cols").get<Eigen::Index>() != refs[i].cols)
            throw DataError("checkpoint " + path.string() + " tensor " + refs[i].name +
                            " has unexpected shape or order");
        const auto& data = tensor.at("data");
        if (static_cast<Eigen::Index>(data.size()) != refs[i].size())
            throw DataError("checkpoint " + path.string() + " tensor " + refs[i].name +
                            " has wrong element count");
        for (Eigen::Index r = 0; r < refs[i].rows; ++r)
            for (Eigen::Index c = 0; c < refs[i].cols; ++c)
                refs[i].data[c * refs[i].rows + r] =
                    data[static_cast<std::size_t>(r * refs[i].cols + c)].get<double>();
    }
    return model;
}

std::vector<LSTMConfig> sweep_grid(const LSTMConfig& base, const std::vector<SweepAxis>& axes) {
    auto assign = [](LSTMConfig& cfg, const std::string& field, double value) {
        if (field == "lookback") cfg.lookback = static_cast<int>(std::llround(value));
        else if (field == "hidden_units") cfg.hidden_units = static_cast<int>(std::llround(value));
        else if (field == "recurrent_layers")
            cfg.recurrent_layers = static_cast<int>(std::llround(value));
        else if (field == "dense_units") cfg.dense_units = static_cast<int>(std::llround(value));
        else if (field == "horizon") cfg.horizon = static_cast<int>(std::llround(value));
        else if (field == "batch_size") cfg.batch_size = static_cast<int>(std::llround(value));
        else if (field == "epochs") cfg.epochs = static_cast<int>(std::llround(value));
        else if (field == "dropout_rate") cfg.dropout_rate = value;
        else if (field == "learning_rate") cfg.learning_rate = value;
        else if (field == "huber_delta") cfg.huber_delta = value;
        else if (field == "validation_split") cfg.validation_split = value;
        else throw std::invalid_argument("sweep_grid: unknown config field " + field);
    };

    std::vector<LSTMConfig> configs{base};
    for (const auto& axis : axes) {
        if (axis.values.empty())
            throw std::invalid_argument("sweep_grid: axis " + axis.field + " has no values");
        std::vector<LSTMConfig> expanded;
        expanded.reserve(configs.size() * axis.values.size());
        for (const auto& cfg : configs)
            for (double value : axis.values) {
                LSTMConfig next = cfg;
                assign(next, axis.field, value);
                expanded.push_back(next);
            }
        configs.swap(expanded);
    }
    for (const auto& cfg : configs) cfg.validate();
    return configs;
}

}  // namespace portlab
