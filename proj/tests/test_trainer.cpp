#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rbfdet/dataset.hpp"
#include "rbfdet/errors.hpp"
#include "rbfdet/evaluator.hpp"
#include "rbfdet/trainer.hpp"

using namespace rbfdet;

namespace {

// Independent least-squares oracle: plain gradient descent on
// ||Phi w - t||^2 + lambda ||w||^2 with a step size from power iteration.
// Deliberately shares nothing with the production solver.
Eigen::VectorXd gradient_descent_ls(const Eigen::MatrixXd& phi, const Eigen::VectorXd& t,
                                    double lambda, int steps) {
    const Eigen::MatrixXd gram = phi.transpose() * phi;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.cols());
    double lmax = 1.0;
    for (int i = 0; i < 200; ++i) {
        v = gram * v;
        lmax = v.norm();
        v /= lmax;
    }
    const double step = 1.0 / (lmax + lambda + 1e-12);

    const Eigen::VectorXd rhs = phi.transpose() * t;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(gram.cols());
    for (int i = 0; i < steps; ++i) {
        w -= step * (gram * w - rhs + lambda * w);
    }
    return w;
}

double objective(const Eigen::MatrixXd& phi, const Eigen::VectorXd& t, const Eigen::VectorXd& w,
                 double lambda) {
    return (phi * w - t).squaredNorm() + lambda * w.squaredNorm();
}

LabeledDataset random_dataset(std::mt19937_64& rng, int n, int dim) {
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    LabeledDataset ds;
    for (int i = 0; i < n; ++i) {
        FeatureVector x(dim);
        for (double& v : x) v = coord(rng);
        ds.inputs.push_back(std::move(x));
        ds.targets.push_back(i % 2 == 0 ? 1.0 : -1.0);
    }
    return ds;
}

} // namespace

TEST_SUITE("trainer") {

TEST_CASE("design matrix has a unit diagonal when samples are the centers") {
    std::mt19937_64 rng(1);
    LabeledDataset ds = random_dataset(rng, 6, 4);
    CenterSet cs;
    cs.centers = ds.inputs;
    const Eigen::MatrixXd phi = build_design_matrix(ds, cs, 0.5);
    REQUIRE(phi.rows() == 6);
    REQUIRE(phi.cols() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(phi(i, i) == 1.0);
        for (int j = 0; j < 6; ++j) {
            CHECK(phi(i, j) > 0.0);
            CHECK(phi(i, j) <= 1.0);
        }
    }
}

TEST_CASE("huge spread drives every design entry to 1") {
    std::mt19937_64 rng(2);
    LabeledDataset ds = random_dataset(rng, 10, 3);
    CenterSet cs;
    cs.centers = {ds.inputs[0], ds.inputs[5]};
    const Eigen::MatrixXd phi = build_design_matrix(ds, cs, 1e6);
    for (int i = 0; i < phi.rows(); ++i)
        for (int j = 0; j < phi.cols(); ++j) CHECK(phi(i, j) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("two scalar samples against their own centers") {
    LabeledDataset ds;
    ds.inputs = {{0.0}, {2.0}};
    ds.targets = {1.0, -1.0};
    CenterSet cs;
    cs.centers = {{0.0}, {2.0}};
    const Eigen::MatrixXd phi = build_design_matrix(ds, cs, 2.0);
    CHECK(phi(0, 0) == 1.0);
    CHECK(phi(1, 1) == 1.0);
    CHECK(phi(0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(phi(1, 0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("design matrix rejects dimension mismatches") {
    LabeledDataset ds;
    ds.inputs = {{0.0, 1.0}};
    ds.targets = {1.0};
    CenterSet cs;
    cs.centers = {{0.0}};
    CHECK_THROWS_AS(build_design_matrix(ds, cs, 1.0), DimensionMismatchError);
}

TEST_CASE("identity design returns the targets as weights") {
    const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(5, 5);
    const std::vector<double> targets{1.0, -1.0, 1.0, 1.0, -1.0};
    const SolveResult res = solve_weights(phi, targets);
    CHECK(res.rank == 5);
    for (int i = 0; i < 5; ++i) CHECK(res.weights[i] == doctest::Approx(targets[i]).epsilon(1e-12));
}

TEST_CASE("identical rows with opposite targets fit to zero") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.4, 0.7, 0.4, 0.7;
    const SolveResult res = solve_weights(phi, {1.0, -1.0});
    const double fitted = 0.4 * res.weights[0] + 0.7 * res.weights[1];
    CHECK(fitted == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solver matches the gradient-descent oracle on random systems") {
    std::mt19937_64 rng(20240501);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd phi(10, 4);
        Eigen::VectorXd t(10);
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 4; ++j) phi(i, j) = gauss(rng);
            t(i) = gauss(rng);
        }
        const std::vector<double> targets(t.begin(), t.end());
        const SolveResult res = solve_weights(phi, targets);
        const Eigen::VectorXd oracle = gradient_descent_ls(phi, t, 0.0, 100000);
        for (int j = 0; j < 4; ++j) CHECK(res.weights[j] == doctest::Approx(oracle(j)).epsilon(1e-6));
    }
}

TEST_CASE("ridge solutions satisfy the regularized normal equations") {
    std::mt19937_64 rng(31415);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double lambda : {0.0, 0.01, 1.0}) {
        Eigen::MatrixXd phi(12, 5);
        Eigen::VectorXd t(12);
        for (int i = 0; i < 12; ++i) {
            for (int j = 0; j < 5; ++j) phi(i, j) = gauss(rng);
            t(i) = gauss(rng);
        }
        const SolveResult res = solve_weights(phi, std::vector<double>(t.begin(), t.end()), lambda);
        const Eigen::Map<const Eigen::VectorXd> w(res.weights.data(), 5);
        const Eigen::VectorXd rhs = phi.transpose() * t;
        const Eigen::VectorXd residual =
            (phi.transpose() * phi + lambda * Eigen::MatrixXd::Identity(5, 5)) * w - rhs;
        const double bound = 1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
        CHECK(residual.lpNorm<Eigen::Infinity>() <= bound);
    }
}

TEST_CASE("rank deficiency yields the minimum-norm solution, not a failure") {
    // Two identical columns: any split of the weight between them fits
    // equally well; minimum norm splits it evenly.
    Eigen::MatrixXd phi(4, 2);
    phi << 1, 1, 2, 2, 3, 3, 4, 4;
    const SolveResult res = solve_weights(phi, {2.0, 4.0, 6.0, 8.0});
    CHECK(res.rank == 1);
    CHECK(res.weights[0] == doctest::Approx(res.weights[1]).epsilon(1e-10));
    CHECK(res.weights[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("non-finite design entries raise a numeric error") {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Ones(3, 2);
    phi(1, 1) = std::nan("");
    CHECK_THROWS_AS(solve_weights(phi, {1.0, 1.0, 1.0}), NumericError);
}

TEST_CASE("returned weights are first-order optimal") {
    std::mt19937_64 rng(9090);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double lambda : {0.0, 0.1}) {
        Eigen::MatrixXd phi(20, 6);
        Eigen::VectorXd t(20);
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 6; ++j) phi(i, j) = gauss(rng);
            t(i) = gauss(rng);
        }
        const SolveResult res = solve_weights(phi, std::vector<double>(t.begin(), t.end()), lambda);
        Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(res.weights.data(), 6);
        const double base = objective(phi, t, w, lambda);
        for (int j = 0; j < 6; ++j) {
            for (double delta : {1e-3, -1e-3}) {
                Eigen::VectorXd nudged = w;
                nudged(j) += delta;
                CHECK(objective(phi, t, nudged, lambda) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("interpolation: one center per distinct sample drives training error to zero") {
    std::mt19937_64 rng(515);
    LabeledDataset ds = random_dataset(rng, 12, 3);
    TrainConfig cfg;
    cfg.strategy = CenterStrategy::KMeans;  // k = N distinct points reproduces them
    cfg.num_centers = 12;
    cfg.spread = 1.0;
    const TrainResult tr = train(ds, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        worst = std::max(worst, std::abs(forward(ds.inputs[i], tr.model) - ds.targets[i]));
    CHECK(worst <= 1e-6);
    CHECK(tr.solver_rank == 12);
}

TEST_CASE("solve_weights is indifferent to row order") {
    std::mt19937_64 rng(626);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd phi(15, 4);
    Eigen::VectorXd t(15);
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 4; ++j) phi(i, j) = gauss(rng);
        t(i) = gauss(rng);
    }
    std::vector<int> perm(15);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd phi_p(15, 4);
    Eigen::VectorXd t_p(15);
    for (int i = 0; i < 15; ++i) {
        phi_p.row(i) = phi.row(perm[i]);
        t_p(i) = t(perm[i]);
    }
    const SolveResult a = solve_weights(phi, std::vector<double>(t.begin(), t.end()));
    const SolveResult b = solve_weights(phi_p, std::vector<double>(t_p.begin(), t_p.end()));
    for (int j = 0; j < 4; ++j)
        CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-9));
}

TEST_CASE("two points with a narrow spread train to near-interpolation") {
    LabeledDataset ds;
    ds.inputs = {{0.0, 0.0}, {3.0, 4.0}};  // distance 5
    ds.targets = {1.0, -1.0};
    TrainConfig cfg;
    cfg.num_centers = 2;
    cfg.spread = 0.5;  // 0.1 x distance
    const TrainResult tr = train(ds, cfg);
    CHECK(std::abs(forward(ds.inputs[0], tr.model) - 1.0) < 1e-3);
    CHECK(std::abs(forward(ds.inputs[1], tr.model) + 1.0) < 1e-3);
}

TEST_CASE("training twice with one seed gives a bit-identical model") {
    const LabeledDataset ds = synth_dataset(99, 60, 8, 10.0);
    TrainConfig cfg;
    cfg.strategy = CenterStrategy::RandomSubset;
    cfg.num_centers = 10;
    cfg.spread = 10.0;
    cfg.seed = 4242;
    const TrainResult a = train(ds, cfg);
    const TrainResult b = train(ds, cfg);
    CHECK(a.model.centers == b.model.centers);
    CHECK(a.model.weights == b.model.weights);
    CHECK(a.solver_rank == b.solver_rank);
}

TEST_CASE("two-blob fixture reaches a high detection rate") {
    const LabeledDataset train_set = synth_dataset(7, 200, 10, 20.0);
    const LabeledDataset test_set = synth_dataset(8, 200, 10, 20.0);
    TrainConfig cfg;
    cfg.num_centers = 8;
    cfg.spread = 20.0;  // the blob separation
    cfg.seed = 1;
    const TrainResult tr = train(train_set, cfg);
    const EvaluationReport rep = evaluate(tr.model, test_set);
    CHECK(rep.face_rate >= 0.95);
    CHECK(rep.nonface_rate >= 0.95);
}

TEST_CASE("train validates its configuration") {
    const LabeledDataset ds = synth_dataset(3, 5, 2, 1.0);
    TrainConfig cfg;
    cfg.num_centers = 11;  // > N
    cfg.spread = 1.0;
    CHECK_THROWS_AS(train(ds, cfg), InvalidParameterError);
    cfg.num_centers = 2;
    cfg.spread = 0.0;
    CHECK_THROWS_AS(train(ds, cfg), InvalidParameterError);

    LabeledDataset bad = ds;
    bad.targets[0] = 0.5;
    cfg.spread = 1.0;
    CHECK_THROWS_AS(train(bad, cfg), InvalidParameterError);
}

} // TEST_SUITE
