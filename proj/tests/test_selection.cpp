#include <doctest.h>

#include <cmath>
#include <random>

#include "hkrig/selection.hpp"

using namespace hkrig;

namespace {

Eigen::VectorXd v(std::initializer_list<double> xs) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) out[i++] = x;
    return out;
}

SweepResult row(int index, double q, double m, bool ok = true) {
    SweepResult r;
    r.index = index;
    r.q2 = q;
    r.mae = m;
    r.ok = ok;
    return r;
}

Dataset forrester_validation() {
    Eigen::MatrixXd X(101, 1);
    Eigen::VectorXd y(101);
    for (int i = 0; i <= 100; ++i) {
        X(i, 0) = i / 100.0;
        y[i] = forrester_hf(X(i, 0));
    }
    return make_dataset(X, y);
}

}  // namespace

TEST_SUITE("selection") {
    TEST_CASE("grid enumeration") {
        const CombinationGrid full;
        const auto all = enumerate_combinations(full);
        CHECK(all.size() == 600);
        CHECK(full.size() == 600);
        const Combination& first = all.front();
        CHECK(first.structure == Structure::Separable);
        CHECK(first.family == Family::Gaussian);
        CHECK(first.isotropic);
        CHECK(first.trend_degree == 0);
        CHECK(first.estimation == Estimation::MLE);
        CHECK(first.optimizer == Method::HybridDE);
        // optimizer varies fastest, structure slowest
        CHECK(all[1].optimizer == Method::HybridGA);
        CHECK(all[3].estimation == Estimation::CV);
        CHECK(all[300].structure == Structure::Ellipsoidal);
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j) CHECK_FALSE(all[i] == all[j]);

        CombinationGrid one;
        one.structures = {Structure::Ellipsoidal};
        one.families = {Family::Linear};
        one.isotropy = {false};
        one.trend_degrees = {3};
        one.estimations = {Estimation::CV};
        one.optimizers = {Method::LocalGradient};
        CHECK(enumerate_combinations(one).size() == 1);

        CombinationGrid gauss;
        gauss.families = {Family::Gaussian};
        CHECK(enumerate_combinations(gauss).size() == 120);
    }

    TEST_CASE("q2 examples") {
        const Eigen::VectorXd y = v({1, 2, 3});
        CHECK(q2(y, y) == 1.0);
        CHECK(std::abs(q2(y, Eigen::VectorXd::Constant(3, y.mean()))) <= 1e-12);
        CHECK(std::abs(q2(y, v({1, 2, 4})) - 0.5) <= 1e-12);
        try {
            q2(Eigen::VectorXd::Constant(3, 2.0), y);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateValidation);
        }
        try {
            q2(y, v({1, 2}));
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Shape);
        }
    }

    TEST_CASE("mae examples") {
        const Eigen::VectorXd y = v({1, 2, 3});
        CHECK(mae(y, y) == 0.0);
        CHECK(std::abs(mae(y, v({1.1, 2, 2.8})) - 0.1) <= 1e-12);
        CHECK(std::abs(mae(y, v({1, 4, 3})) - 1.0) <= 1e-12);
        CHECK_THROWS_AS(mae(Eigen::VectorXd::Constant(3, 1.0), y), Error);
        CHECK_THROWS_AS(mae(y, v({1})), Error);
    }

    TEST_CASE("metric invariances") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> n(0.0, 1.0);
        std::uniform_real_distribution<double> a(-5.0, 5.0), pos(0.1, 10.0);
        for (int trial = 0; trial < 200; ++trial) {
            const Eigen::VectorXd t = Eigen::VectorXd::NullaryExpr(12, [&] { return n(rng); });
            const Eigen::VectorXd p = t + 0.5 * Eigen::VectorXd::NullaryExpr(12, [&] { return n(rng); });
            double scale = a(rng);
            if (std::abs(scale) < 0.1) scale = 0.1;
            const double shift = a(rng), k = pos(rng);
            const Eigen::VectorXd ta = (scale * t).array() + shift, pa = (scale * p).array() + shift;
            CHECK(q2(t, p) <= 1.0);
            CHECK(std::abs(q2(ta, pa) - q2(t, p)) <= 1e-12);
            CHECK(mae(t, p) >= 0.0);
            const Eigen::VectorXd ts = t.array() + shift, ps = p.array() + shift;
            CHECK(std::abs(mae(ts, ps) - mae(t, p)) <= 1e-12);
            CHECK(std::abs(mae(k * t, k * p) - mae(t, p)) <= 1e-12);
        }
    }

    TEST_CASE("select_best rules") {
        const std::vector<SweepResult> rows{row(1, 0.2, 0.5), row(2, 0.9, 0.3), row(3, 0.9, 0.4)};
        CHECK(select_best(rows, Criterion::Q2).index == 2);
        CHECK(select_best(rows, Criterion::MAE).index == 2);

        const std::vector<SweepResult> single{row(1, 0, 0, false), row(7, 0.3, 0.9)};
        CHECK(select_best(single, Criterion::Q2).index == 7);
        CHECK(select_best(single, Criterion::MAE).index == 7);

        const std::vector<SweepResult> split{row(9, 0.8, 0.2), row(371, 0.95, 0.3)};
        CHECK(select_best(split, Criterion::Q2).index == 371);
        CHECK(select_best(split, Criterion::MAE).index == 9);

        const std::vector<SweepResult> tie{row(5, 0.5, 0.5), row(4, 0.5, 0.5)};
        CHECK(select_best(tie, Criterion::Q2).index == 4);

        const std::vector<SweepResult> none{row(1, 0, 0, false)};
        try {
            select_best(none, Criterion::Q2);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoModel);
        }
        // pure: the same call gives the same row
        CHECK(&select_best(rows, Criterion::MAE) == &select_best(rows, Criterion::MAE));
    }

    TEST_CASE("one combination scores perfectly on its own training data") {
        const FidelityPair p = forrester_doe();
        CombinationGrid one;
        one.structures = {Structure::Separable};
        one.families = {Family::Gaussian};
        one.isotropy = {true};
        one.trend_degrees = {0};
        one.estimations = {Estimation::MLE};
        one.optimizers = {Method::HybridDE};
        SweepOptions o;
        o.mode = SweepMode::Conventional;
        const auto r = run_sweep(one, std::nullopt, p.hf, p.hf, o);
        REQUIRE(r.size() == 1);
        REQUIRE(r[0].ok);
        CHECK(r[0].q2 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r[0].mae <= 1e-6);
    }

    TEST_CASE("sweeps are reproducible and ordered") {
        const FidelityPair p = forrester_doe();
        const Dataset val = forrester_validation();
        CombinationGrid g;
        g.families = {Family::Matern32, Family::Linear};
        g.trend_degrees = {0, 2};
        SweepOptions o;
        o.base_seed = 42;
        const auto a = run_sweep(g, p.lf, p.hf, val, o);
        o.workers = 4;
        const auto b = run_sweep(g, p.lf, p.hf, val, o);
        REQUIRE(a.size() == g.size());
        REQUIRE(b.size() == g.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].index == static_cast<int>(k + 1));
            CHECK(b[k].index == a[k].index);
            CHECK(a[k].ok == b[k].ok);
            CHECK(a[k].seed == combination_seed(42, a[k].index));
            if (a[k].ok) {
                CHECK(a[k].q2 == b[k].q2);
                CHECK(a[k].mae == b[k].mae);
            } else {
                CHECK_FALSE(a[k].failure.empty());
            }
        }
    }

    TEST_CASE("failures are recorded per row") {
        const FidelityPair p = forrester_doe();
        const Dataset val = forrester_validation();
        CombinationGrid g;
        g.families = {Family::Gaussian};
        g.isotropy = {true};
        g.trend_degrees = {4};  // 5 basis terms on 4 HF points
        g.estimations = {Estimation::MLE};
        g.optimizers = {Method::HybridDE};
        g.structures = {Structure::Separable};
        SweepOptions o;
        o.mode = SweepMode::Conventional;
        const auto r = run_sweep(g, std::nullopt, p.hf, val, o);
        REQUIRE(r.size() == 1);
        CHECK_FALSE(r[0].ok);
        CHECK(r[0].failure.find("underdetermined") != std::string::npos);

        o.mode = SweepMode::Hierarchical;
        CHECK_THROWS_AS(run_sweep(g, std::nullopt, p.hf, val, o), Error);
        const Dataset flat = make_dataset(val.X, Eigen::VectorXd::Ones(val.n()));
        CHECK_THROWS_AS(run_sweep(g, p.lf, p.hf, flat, o), Error);
    }

    TEST_CASE("shared low-fidelity model") {
        const FidelityPair p = forrester_doe();
        const Dataset val = forrester_validation();
        CombinationGrid g;
        g.families = {Family::Gaussian, Family::Matern52};
        g.trend_degrees = {0};
        g.estimations = {Estimation::MLE};
        g.optimizers = {Method::HybridDE};
        SweepOptions o;
        o.shared_lf = true;
        const auto r = run_sweep(g, p.lf, p.hf, val, o);
        REQUIRE(r[0].ok);
        REQUIRE(r[1].ok);
        CHECK(r[0].model->trend().lower == r[1].model->trend().lower);
    }
}
