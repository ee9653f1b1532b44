#include <doctest.h>

#include <cmath>

#include "hkrig/hierarchical.hpp"
#include "hkrig/serialize.hpp"
#include "oracles.hpp"

using namespace hkrig;

namespace {

HyperParams th(double t) { return HyperParams(Eigen::VectorXd::Constant(1, t)); }

std::shared_ptr<const KrigingModel> constant_lf(double c) {
    Eigen::MatrixXd X(5, 1);
    X << -1, 0, 0.5, 1, 2;
    return std::make_shared<const KrigingModel>(
        KrigingModel::condition(make_dataset(X, Eigen::VectorXd::Constant(5, c)), {}, TrendSpec::ordinary(), th(0.5)));
}

}  // namespace

TEST_SUITE("hierarchical") {
    TEST_CASE("constant low-fidelity trend reduces to ordinary Kriging") {
        const FidelityPair p = forrester_doe();
        for (double c : {1.0, -2.5}) {
            const auto lf = constant_lf(c);
            CHECK(lf->predict(Eigen::VectorXd::Constant(1, 0.37)).mean == c);
            for (Family f : {Family::Gaussian, Family::Matern32, Family::Exponential})
                for (double t : {0.2, 0.6}) {
                    const KrigingModel hk = KrigingModel::condition(p.hf, {f}, TrendSpec::external(lf), th(t));
                    const KrigingModel ok = KrigingModel::condition(p.hf, {f}, TrendSpec::ordinary(), th(t));
                    for (int i = 0; i < 50; ++i) {
                        Eigen::VectorXd x(1);
                        x << -0.1 + 1.2 * (i + 0.5) / 50.0;
                        const Prediction a = hk.predict(x), b = ok.predict(x);
                        CHECK(oracle::close_rel(a.mean, b.mean, 1e-8));
                        CHECK(oracle::close_rel(a.variance, b.variance, 1e-8));
                    }
                }
        }
    }

    TEST_CASE("HF equal to a scaled LF mean gives beta = 2 and no residual") {
        const FidelityPair p = forrester_doe();
        const auto lf = std::make_shared<const KrigingModel>(fit(p.lf, {}, TrendSpec::ordinary(), Estimation::MLE, {}, 1));
        Dataset hf = p.hf;
        for (Eigen::Index i = 0; i < hf.n(); ++i) hf.y[i] = 2.0 * lf->predict_mean(hf.X.row(i).transpose());
        const KrigingModel hk = fit_hierarchical(lf, hf, {}, Estimation::MLE, {}, 2);
        CHECK(hk.beta()[0] == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(hk.sigma2_original() < 1e-12);
    }

    TEST_CASE("forrester scaling factor") {
        const FidelityPair p = forrester_doe();
        const auto lf = std::make_shared<const KrigingModel>(fit(p.lf, {}, TrendSpec::ordinary(), Estimation::MLE, {}, 1));
        const KrigingModel hk = fit_hierarchical(lf, p.hf, {}, Estimation::MLE, {}, 2);
        CHECK(hk.beta()[0] >= 1.8);
        CHECK(hk.beta()[0] <= 2.2);

        HierarchicalModel h(lf);
        h.push_level(std::make_shared<const KrigingModel>(hk));
        CHECK(h.levels() == 2);
        CHECK(h.beta_scale(1) == hk.beta()[0]);

        const double range = p.hf.y.maxCoeff() - p.hf.y.minCoeff();
        for (Eigen::Index i = 0; i < p.hf.n(); ++i) {
            const Prediction pr = predict_hierarchical(h, p.hf.X.row(i).transpose());
            CHECK(std::abs(pr.mean - p.hf.y[i]) <= 1e-6 * range);
            CHECK(pr.variance <= 1e-8 * hk.sigma2_original());
        }
        for (double x : {0.05, 0.33, 0.81}) {
            const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x);
            const Prediction a = predict_hierarchical(h, v), b = hk.predict(v);
            CHECK(a.mean == b.mean);
            CHECK(a.variance == b.variance);
        }
    }

    TEST_CASE("outside the Linear support the prediction is beta times the LF mean") {
        const FidelityPair p = forrester_doe();
        const auto lf = std::make_shared<const KrigingModel>(
            KrigingModel::condition(p.lf, {Family::Gaussian}, TrendSpec::ordinary(), th(0.3)));
        const KrigingModel hk = KrigingModel::condition(p.hf, {Family::Linear}, TrendSpec::external(lf), th(0.05));
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.2);
        CHECK(hk.predict(x).mean == doctest::Approx(hk.beta()[0] * lf->predict_mean(x)).epsilon(1e-12));
    }

    TEST_CASE("refitting the HF level leaves the LF model untouched") {
        const FidelityPair p = forrester_doe();
        const auto lf = std::make_shared<const KrigingModel>(fit(p.lf, {}, TrendSpec::ordinary(), Estimation::MLE, {}, 1));
        const std::string before = dump_document(model_to_json(*lf));
        fit_hierarchical(lf, p.hf, {}, Estimation::MLE, {}, 2);
        fit_hierarchical(lf, p.hf, {Family::Matern52}, Estimation::CV, {}, 3);
        CHECK(dump_document(model_to_json(*lf)) == before);
    }

    TEST_CASE("three levels and dimension checks") {
        const FidelityPair p = forrester_doe();
        Eigen::MatrixXd Xm(6, 1);
        Xm << 0, 0.2, 0.4, 0.6, 0.8, 1;
        Eigen::VectorXd ym(6);
        for (int i = 0; i < 6; ++i) ym[i] = 0.5 * (forrester_lf(Xm(i, 0)) + forrester_hf(Xm(i, 0)));
        const HierarchicalModel h = fit_hierarchy({p.lf, make_dataset(Xm, ym), p.hf}, {{}, {}, {}},
                                                  TrendSpec::ordinary(), Estimation::MLE, {}, 4);
        CHECK(h.levels() == 3);
        CHECK(h.level(2).trend().lower.get() == &h.level(1));
        CHECK(std::isfinite(predict_hierarchical(h, Eigen::VectorXd::Constant(1, 0.5)).mean));

        const FidelityPair s = synthetic_3d_pair(20, 12, 0.0, 1);
        try {
            fit_hierarchical(h.top(), s.hf, {}, Estimation::MLE, {}, 0);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Shape);
            CHECK(std::string(e.what()).find('1') != std::string::npos);
            CHECK(std::string(e.what()).find('3') != std::string::npos);
        }
        HierarchicalModel base(h.top());
        CHECK_THROWS_AS(base.push_level(std::make_shared<const KrigingModel>(h.level(0))), Error);
    }

    TEST_CASE("hierarchical documents are self-contained") {
        const FidelityPair p = forrester_doe();
        const auto lf = std::make_shared<const KrigingModel>(fit(p.lf, {}, TrendSpec::ordinary(), Estimation::MLE, {}, 1));
        const KrigingModel hk = fit_hierarchical(lf, p.hf, {}, Estimation::MLE, {}, 2);
        const std::string text = dump_document(model_to_json(hk));
        const auto back = model_from_json(nlohmann::json::parse(text));
        for (int i = 0; i <= 40; ++i) {
            const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, i / 40.0);
            CHECK(std::abs(back->predict(x).mean - hk.predict(x).mean) <= 1e-12 * std::max(1.0, std::abs(hk.predict(x).mean)));
            CHECK(std::abs(back->predict(x).variance - hk.predict(x).variance) <= 1e-12 * std::max(1.0, hk.sigma2_original()));
        }
        CHECK(dump_document(model_to_json(*back)) == text);
        CHECK(hierarchy_of(back).levels() == 2);
    }
}
