#include <doctest.h>

#include <cmath>

#include "mwecx/model.hpp"
#include "mwecx/model_io.hpp"
#include "support/fixtures.hpp"

using namespace mwecx;
using namespace mwecx::testing;

namespace {

MlpConfig small_config(Activation act = Activation::Tanh, std::uint64_t seed = 1) {
    MlpConfig cfg;
    cfg.hidden_layers = {8, 8};
    cfg.activation = act;
    cfg.l2_alpha = 0.0;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("init_params: determinism, seeding, Glorot bound") {
    MlpConfig cfg = small_config();
    auto p1 = init_params(cfg, 5);
    auto p2 = init_params(cfg, 5);
    for (std::size_t l = 0; l < p1.weights.size(); ++l) {
        CHECK(p1.weights[l] == p2.weights[l]);
        CHECK(p1.biases[l].isZero());
    }

    cfg.seed = 2;
    auto p3 = init_params(cfg, 5);
    CHECK(p1.weights[0] != p3.weights[0]);

    MlpConfig tiny;
    tiny.hidden_layers = {3};
    tiny.seed = 7;
    auto p = init_params(tiny, 4);
    double bound = std::sqrt(6.0 / 7.0);
    CHECK(p.weights[0].cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("forward: zero params give zero output") {
    MlpConfig cfg = small_config();
    auto p = init_params(cfg, 3);
    for (auto& w : p.weights) w.setZero();
    EncodedVector x = {0.3, -0.5, 1.0};
    CHECK(forward(p, x, cfg.activation) == doctest::Approx(0.0));
}

TEST_CASE("forward: single tanh unit matches hand computation") {
    MlpConfig cfg;
    cfg.hidden_layers = {1};
    cfg.activation = Activation::Tanh;
    auto p = init_params(cfg, 2);
    p.weights[0](0, 0) = 0.5;
    p.weights[0](1, 0) = -0.25;
    p.biases[0](0) = 0.1;
    p.weights[1](0, 0) = 2.0;
    p.biases[1](0) = -0.3;
    EncodedVector x = {0.4, 0.8};
    double hidden = std::tanh(0.5 * 0.4 - 0.25 * 0.8 + 0.1);
    CHECK(forward(p, x, Activation::Tanh) == doctest::Approx(2.0 * hidden - 0.3));
}

TEST_CASE("forward: relu with zero input propagates the bias path") {
    MlpConfig cfg;
    cfg.hidden_layers = {2};
    cfg.activation = Activation::Relu;
    cfg.seed = 3;
    auto p = init_params(cfg, 2);
    p.biases[0](0) = 0.5;
    p.biases[0](1) = -1.0;  // relu kills this unit at zero input
    EncodedVector zero = {0.0, 0.0};
    double expected = p.weights[1](0, 0) * 0.5 + p.biases[1](0);
    CHECK(forward(p, zero, Activation::Relu) == doctest::Approx(expected));
}

TEST_CASE("loss is zero when predictions equal targets") {
    MlpConfig cfg;
    cfg.hidden_layers = {1};
    cfg.activation = Activation::Tanh;
    cfg.seed = 5;
    auto p = init_params(cfg, 1);
    Eigen::MatrixXd x(2, 1);
    x << 0.2, 0.8;
    Eigen::VectorXd y = forward_batch(p, x, cfg.activation);
    MlpParams grads;
    double loss = loss_and_grad(p, x, y, cfg.activation, 0.0, grads);
    CHECK(loss == doctest::Approx(0.0));
    for (const auto& g : grads.weights) CHECK(g.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single linear layer gradient equals residual times input") {
    // network with one "hidden" layer of width 1 reduced to identity-ish by
    // using a direct check on the analytic formula instead: use a 0-hidden
    // trick via hand-set weights and tanh'(0) = 1 region is messy, so check
    // against finite differences on a 1-sample batch.
    MlpConfig cfg = small_config(Activation::Tanh, 11);
    auto p = init_params(cfg, 3);
    Eigen::MatrixXd x(1, 3);
    x << 0.25, -0.5, 0.75;
    Eigen::VectorXd y(1);
    y << 0.3;
    MlpParams grads;
    loss_and_grad(p, x, y, cfg.activation, 0.0, grads);

    Vector flat;
    detail::pack(p, flat);
    MlpParams scratch = p;
    auto value_only = [&](const Vector& theta) {
        detail::unpack(theta, scratch);
        Eigen::VectorXd pred = forward_batch(scratch, x, cfg.activation);
        return (pred - y).squaredNorm() / 2.0;
    };
    Vector fd = finite_difference_gradient(value_only, flat, 1e-6);
    Vector analytic;
    detail::pack(grads, analytic);
    for (std::size_t i = 0; i < flat.size(); ++i)
        CHECK(analytic[i] == doctest::Approx(fd[i]).epsilon(1e-5).scale(1.0));
}

TEST_CASE("backprop matches finite differences on 20 random tanh draws") {
    SplitMix64 rng(2718, 3);
    for (int trial = 0; trial < 20; ++trial) {
        MlpConfig cfg;
        std::size_t depth = 1 + rng.next_below(3);
        for (std::size_t l = 0; l < depth; ++l) cfg.hidden_layers.push_back(2 + rng.next_below(5));
        cfg.hidden_layers.resize(depth);
        cfg.activation = Activation::Tanh;
        cfg.l2_alpha = trial % 2 == 0 ? 0.0 : 1e-3;
        cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
        std::size_t input_dim = 2 + rng.next_below(4);
        auto p = init_params(cfg, input_dim);

        std::size_t batch = 1 + rng.next_below(5);
        Eigen::MatrixXd x(static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(input_dim));
        Eigen::VectorXd y(static_cast<Eigen::Index>(batch));
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.next_uniform(-1.0, 1.0);
            y(i) = rng.next_uniform(0.0, 1.0);
        }

        MlpParams grads;
        loss_and_grad(p, x, y, cfg.activation, cfg.l2_alpha, grads);
        Vector analytic;
        detail::pack(grads, analytic);

        Vector flat;
        detail::pack(p, flat);
        MlpParams scratch = p;
        auto value_only = [&](const Vector& theta) {
            detail::unpack(theta, scratch);
            MlpParams unused = scratch;
            return loss_and_grad(scratch, x, y, cfg.activation, cfg.l2_alpha, unused);
        };
        Vector fd = finite_difference_gradient(value_only, flat, 1e-6);

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < flat.size(); ++i) {
            num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
            den += fd[i] * fd[i];
        }
        CHECK(std::sqrt(num) <= 1e-5 * std::max(1.0, std::sqrt(den)));
    }
}

TEST_CASE("training fits a constant target") {
    std::vector<FeatureVector> train_set;
    std::vector<double> targets;
    SplitMix64 rng(1, 1);
    for (int i = 0; i < 30; ++i) {
        FeatureVector v;
        v.length = 2 + rng.next_below(3);
        v.frequency = rng.next_uniform(0.0, 100.0);
        v.max_cw = rng.next_uniform(0.3, 1.0);
        v.mean_cw = v.max_cw * rng.next_uniform(0.5, 1.0);
        v.mwe_type = kAllMweTypes[1 + rng.next_below(12)];
        v.genre = kAllGenres[rng.next_below(3)];
        train_set.push_back(v);
        targets.push_back(0.05);
    }
    MlpConfig cfg = small_config(Activation::Tanh, 9);
    LbfgsConfig lbfgs;
    lbfgs.max_iters = 300;
    auto model = train(train_set, targets, cfg, lbfgs);
    for (const auto& v : train_set)
        CHECK(std::abs(model.predict_features(v) - 0.05) <= 1e-3);
}

TEST_CASE("training drives a realizable linear target to tiny MSE") {
    std::vector<FeatureVector> train_set;
    std::vector<double> targets;
    SplitMix64 rng(12, 4);
    for (int i = 0; i < 50; ++i) {
        FeatureVector v;
        v.length = 2 + rng.next_below(4);
        v.frequency = rng.next_uniform(0.0, 50.0);
        v.max_cw = rng.next_uniform(0.0, 1.0);
        v.mean_cw = v.max_cw * 0.8;
        v.mwe_type = MweType::MwCompound;
        v.genre = Genre::News;
        train_set.push_back(v);
        targets.push_back(0.1 + 0.3 * v.max_cw + 0.05 * static_cast<double>(v.length));
    }
    MlpConfig cfg = small_config(Activation::Tanh, 21);
    LbfgsConfig lbfgs;
    lbfgs.max_iters = 2000;
    lbfgs.grad_tol = 1e-10;
    auto model = train(train_set, targets, cfg, lbfgs);
    double mse = 0.0;
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        double err = model.predict_features(train_set[i]) - targets[i];
        mse += err * err;
    }
    mse /= static_cast<double>(train_set.size());
    CHECK(mse <= 1e-4);

    // determinism: same seed, same data, same predictions
    auto model2 = train(train_set, targets, cfg, lbfgs);
    for (const auto& v : train_set)
        CHECK(model.predict_features(v) == model2.predict_features(v));
}

TEST_CASE("final training loss never exceeds the initial loss") {
    std::vector<FeatureVector> train_set;
    std::vector<double> targets;
    SplitMix64 rng(77, 0);
    for (int i = 0; i < 40; ++i) {
        FeatureVector v;
        v.length = 2 + rng.next_below(3);
        v.frequency = rng.next_uniform(0.0, 10.0);
        v.max_cw = rng.next_uniform(0.0, 1.0);
        v.mean_cw = v.max_cw;
        v.mwe_type = MweType::FixedPhrase;
        v.genre = Genre::Wikipedia;
        train_set.push_back(v);
        targets.push_back(rng.next_uniform(0.0, 0.7));
    }
    MlpConfig cfg = small_config(Activation::Relu, 33);
    cfg.l2_alpha = 1e-4;
    auto encoder = fit_encoder(train_set);
    Eigen::MatrixXd x(40, static_cast<Eigen::Index>(encoder.dimension()));
    Eigen::VectorXd y(40);
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        auto e = encode(train_set[i], encoder);
        for (std::size_t j = 0; j < e.size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e[j];
        y(static_cast<Eigen::Index>(i)) = targets[i];
    }
    auto p0 = init_params(cfg, encoder.dimension());
    MlpParams unused = p0;
    double initial = loss_and_grad(p0, x, y, cfg.activation, cfg.l2_alpha, unused);
    auto r = train_mlp(x, y, cfg, {});
    CHECK(r.final_loss <= initial);
}

TEST_CASE("grid rounding") {
    CHECK(round_to_grid(0.063, 0.05) == doctest::Approx(0.05));
    CHECK(round_to_grid(0.075, 0.05) == doctest::Approx(0.10));  // half rounds up
    CHECK(round_to_grid(-0.02, 0.05) == doctest::Approx(0.0));
    CHECK(round_to_grid(1.17, 0.05) == doctest::Approx(1.0));
    CHECK(round_to_grid(0.05, 0.1) == doctest::Approx(0.1));
    CHECK_THROWS_AS(round_to_grid(0.5, 0.0), InvalidArgument);
}

TEST_CASE("baselines") {
    ConstantBaseline c(0.05);
    CHECK(c.predict({}) == doctest::Approx(0.05));
    CHECK_THROWS_AS(ConstantBaseline(1.5), InvalidArgument);

    ModeBaseline mostly(std::vector<double>{0.05, 0.05, 0.05, 0.10, 0.0});
    CHECK(mostly.value() == doctest::Approx(0.05));
    ModeBaseline zero_mode(std::vector<double>{0.0, 0.0, 0.05});
    CHECK(zero_mode.value() == doctest::Approx(0.0));
    ModeBaseline tie(std::vector<double>{0.05, 0.10, 0.05, 0.10});
    CHECK(tie.value() == doctest::Approx(0.05));  // tie toward smaller
    CHECK_THROWS_AS(ModeBaseline(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("model serialization reproduces predictions bit-for-bit") {
    std::vector<FeatureVector> train_set;
    std::vector<double> targets;
    SplitMix64 rng(8, 8);
    for (int i = 0; i < 25; ++i) {
        FeatureVector v;
        v.length = 2 + rng.next_below(3);
        v.frequency = rng.next_uniform(0.0, 40.0);
        v.max_cw = rng.next_uniform(0.0, 1.0);
        v.mean_cw = v.max_cw * 0.9;
        v.mwe_type = kAllMweTypes[1 + rng.next_below(12)];
        v.genre = kAllGenres[rng.next_below(3)];
        train_set.push_back(v);
        targets.push_back(rng.next_uniform(0.0, 0.5));
    }
    MlpConfig cfg = small_config(Activation::Relu, 555);
    LbfgsConfig lbfgs;
    lbfgs.max_iters = 50;
    auto model = train(train_set, targets, cfg, lbfgs);

    TempDir dir;
    std::string path = dir.path("model.json");
    save_model(model, path);
    auto loaded = load_model(path);
    for (const auto& v : train_set)
        CHECK(model.predict_features(v) == loaded.predict_features(v));
}
