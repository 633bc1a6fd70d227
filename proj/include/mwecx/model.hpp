#ifndef MWECX_MODEL_HPP
#define MWECX_MODEL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mwecx/errors.hpp"
#include "mwecx/features.hpp"
#include "mwecx/optim.hpp"
#include "mwecx/rng.hpp"

namespace mwecx {

enum class Activation { Relu, Tanh };

inline std::string_view to_string(Activation a) {
    return a == Activation::Relu ? "relu" : "tanh";
}

inline std::optional<Activation> parse_activation(std::string_view s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    return std::nullopt;
}

struct MlpConfig {
    std::vector<std::size_t> hidden_layers = {100, 100, 100, 100, 100, 100};
    Activation activation = Activation::Relu;
    double l2_alpha = 1e-4;
    std::uint64_t seed = 0;
};

// Weights/biases per layer; dimensions chain input -> hidden widths -> 1.
struct MlpParams {
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: in x out
    std::vector<Eigen::VectorXd> biases;

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l)
            n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
        return n;
    }
};

// Glorot-uniform weights, zero biases, from the portable generator so the
// same seed gives the same parameters on every platform.
inline MlpParams init_params(const MlpConfig& cfg, std::size_t input_dim) {
    if (input_dim < 1) throw InvalidArgument("init_params: input_dim must be >= 1");
    if (cfg.hidden_layers.empty()) throw InvalidArgument("init_params: need >= 1 hidden layer");
    for (std::size_t w : cfg.hidden_layers)
        if (w < 1) throw InvalidArgument("init_params: hidden widths must be >= 1");

    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
    dims.push_back(1);

    SplitMix64 rng(cfg.seed, /*stream=*/0x494e4954ULL);
    MlpParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        std::size_t fan_in = dims[l], fan_out = dims[l + 1];
        double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Eigen::MatrixXd w(fan_in, fan_out);
        for (std::size_t i = 0; i < fan_in; ++i)
            for (std::size_t j = 0; j < fan_out; ++j)
                w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    rng.next_uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out)));
    }
    return p;
}

namespace detail {

inline void activate_inplace(Eigen::MatrixXd& z, Activation a) {
    if (a == Activation::Relu)
        z = z.cwiseMax(0.0);
    else
        z = z.array().tanh().matrix();
}

inline Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& activated, Activation a) {
    if (a == Activation::Relu)
        return (activated.array() > 0.0).cast<double>().matrix();
    return (1.0 - activated.array().square()).matrix();
}

inline void pack(const MlpParams& p, Vector& flat) {
    flat.clear();
    flat.reserve(p.parameter_count());
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const auto& w = p.weights[l];
        flat.insert(flat.end(), w.data(), w.data() + w.size());
        const auto& b = p.biases[l];
        flat.insert(flat.end(), b.data(), b.data() + b.size());
    }
}

inline void unpack(const Vector& flat, MlpParams& p) {
    std::size_t pos = 0;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        auto& w = p.weights[l];
        std::copy(flat.begin() + pos, flat.begin() + pos + w.size(), w.data());
        pos += static_cast<std::size_t>(w.size());
        auto& b = p.biases[l];
        std::copy(flat.begin() + pos, flat.begin() + pos + b.size(), b.data());
        pos += static_cast<std::size_t>(b.size());
    }
}

}  // namespace detail

// Batch forward pass; X is samples x input_dim, returns samples x 1.
inline Eigen::VectorXd forward_batch(const MlpParams& p, const Eigen::MatrixXd& x,
                                     Activation activation) {
    if (x.cols() != p.weights.front().rows())
        throw InvalidArgument("forward: input dimension mismatch");
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        h = (h * p.weights[l]).rowwise() + p.biases[l].transpose();
        if (l + 1 < p.weights.size()) detail::activate_inplace(h, activation);
    }
    return h.col(0);
}

inline double forward(const MlpParams& p, const EncodedVector& x, Activation activation) {
    Eigen::MatrixXd xm(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) xm(0, static_cast<Eigen::Index>(i)) = x[i];
    return forward_batch(p, xm, activation)(0);
}

// value = MSE/2 + (l2_alpha/2) * |weights|^2 (biases unpenalized), gradient
// by reverse-mode accumulation. Gradient layout matches detail::pack.
inline double loss_and_grad(const MlpParams& p, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y, Activation activation, double l2_alpha,
                            MlpParams& grad_out) {
    if (x.rows() == 0) throw InvalidArgument("loss_and_grad: empty batch");
    const std::size_t layers = p.weights.size();
    const double n = static_cast<double>(x.rows());

    std::vector<Eigen::MatrixXd> activations;  // post-activation per layer, [0] = input
    activations.reserve(layers + 1);
    activations.push_back(x);
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < layers; ++l) {
        h = (h * p.weights[l]).rowwise() + p.biases[l].transpose();
        if (l + 1 < layers) detail::activate_inplace(h, activation);
        activations.push_back(h);
    }

    Eigen::VectorXd residual = activations.back().col(0) - y;
    double loss = residual.squaredNorm() / (2.0 * n);
    for (const auto& w : p.weights) loss += 0.5 * l2_alpha * w.squaredNorm();

    grad_out.weights.resize(layers);
    grad_out.biases.resize(layers);
    Eigen::MatrixXd delta = residual / n;  // n x 1
    for (std::size_t l = layers; l-- > 0;) {
        grad_out.weights[l] = activations[l].transpose() * delta + l2_alpha * p.weights[l];
        grad_out.biases[l] = delta.colwise().sum().transpose();
        if (l > 0) {
            delta = (delta * p.weights[l].transpose())
                        .cwiseProduct(detail::activation_derivative(activations[l], activation));
        }
    }
    return loss;
}

struct TrainResult {
    MlpParams params;
    OptStatus status = OptStatus::Converged;
    double final_loss = 0.0;
    std::size_t iterations = 0;
};

inline TrainResult train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const MlpConfig& cfg, const LbfgsConfig& lbfgs_cfg = {}) {
    if (x.rows() == 0) throw InvalidArgument("train_mlp: empty training set");
    MlpParams params = init_params(cfg, static_cast<std::size_t>(x.cols()));
    MlpParams grads = params;  // shape template

    ObjectiveFunction objective = [&](const Vector& flat, Vector& grad) {
        detail::unpack(flat, params);
        double loss = loss_and_grad(params, x, y, cfg.activation, cfg.l2_alpha, grads);
        detail::pack(grads, grad);
        return loss;
    };

    Vector x0;
    detail::pack(params, x0);
    OptResult opt = minimize(objective, x0, lbfgs_cfg);

    TrainResult result;
    detail::unpack(opt.x_final, params);
    result.params = params;
    result.status = opt.status;
    result.final_loss = opt.f_final;
    result.iterations = opt.iterations;
    return result;
}

// ---- Grid rounding ------------------------------------------------------

// Clamp to [0,1], snap to the nearest multiple of step; exact halves round
// up. The 1e-9 slack absorbs binary representation error on grid midpoints.
inline double round_to_grid(double raw, double step) {
    if (step <= 0.0) throw InvalidArgument("round_to_grid: step must be > 0");
    double clamped = std::clamp(raw, 0.0, 1.0);
    double k = std::floor(clamped / step + 0.5 + 1e-9);
    double max_k = std::floor(1.0 / step + 1e-9);
    k = std::clamp(k, 0.0, max_k);
    return k * step;
}

// ---- Regressors ---------------------------------------------------------

class Regressor {
public:
    virtual ~Regressor() = default;
    virtual double predict(const EncodedVector& x) const = 0;
};

class ConstantBaseline final : public Regressor {
public:
    explicit ConstantBaseline(double c) : c_(c) {
        if (c < 0.0 || c > 1.0) throw InvalidArgument("constant baseline outside [0,1]");
    }
    double predict(const EncodedVector&) const override { return c_; }
    double value() const { return c_; }

private:
    double c_;
};

// Predicts the modal training label; ties broken toward the smaller value.
class ModeBaseline final : public Regressor {
public:
    explicit ModeBaseline(const std::vector<double>& train_labels) {
        if (train_labels.empty()) throw InvalidArgument("mode baseline: no labels");
        std::map<double, std::size_t> counts;
        for (double v : train_labels) ++counts[v];
        std::size_t best = 0;
        for (const auto& [value, n] : counts)
            if (n > best) { best = n; mode_ = value; }  // map order makes ties favor smaller
    }
    double predict(const EncodedVector&) const override { return mode_; }
    double value() const { return mode_; }

private:
    double mode_ = 0.0;
};

// Trained model bundled with the encoder that produced its inputs.
struct MlpModel final : public Regressor {
    MlpConfig config;
    MlpParams params;
    EncoderState encoder;
    OptStatus train_status = OptStatus::Converged;
    double final_loss = 0.0;

    double predict(const EncodedVector& x) const override {
        return forward(params, x, config.activation);
    }

    double predict_features(const FeatureVector& v) const { return predict(encode(v, encoder)); }
};

inline MlpModel train(const std::vector<FeatureVector>& train_set,
                      const std::vector<double>& targets, const MlpConfig& cfg,
                      const LbfgsConfig& lbfgs_cfg = {},
                      const FeatureGroupSet& groups = all_feature_groups()) {
    if (train_set.empty()) throw InvalidArgument("train: empty training set");
    if (train_set.size() != targets.size())
        throw InvalidArgument("train: features/targets length mismatch");

    MlpModel model;
    model.config = cfg;
    model.encoder = fit_encoder(train_set, groups);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(train_set.size()),
                      static_cast<Eigen::Index>(model.encoder.dimension()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        EncodedVector e = encode(train_set[i], model.encoder);
        for (std::size_t j = 0; j < e.size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e[j];
        y(static_cast<Eigen::Index>(i)) = targets[i];
    }

    TrainResult r = train_mlp(x, y, cfg, lbfgs_cfg);
    model.params = std::move(r.params);
    model.train_status = r.status;
    model.final_loss = r.final_loss;
    return model;
}

}  // namespace mwecx

#endif
