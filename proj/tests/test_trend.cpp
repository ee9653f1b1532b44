#include <doctest.h>

#include <random>

#include "hkrig/kriging.hpp"
#include "hkrig/serialize.hpp"

using namespace hkrig;

TEST_SUITE("trend") {
    TEST_CASE("basis counts") {
        CHECK(TrendSpec::ordinary().basis_count(3) == 1);
        // C(d + k, k)
        CHECK(TrendSpec::polynomial(1).basis_count(2) == 3);
        CHECK(TrendSpec::polynomial(2).basis_count(3) == 10);
        CHECK(TrendSpec::polynomial(4).basis_count(3) == 35);
        CHECK(TrendSpec::polynomial(4).basis_count(1) == 5);
        CHECK_THROWS_AS(TrendSpec::polynomial(0), Error);
        CHECK_THROWS_AS(TrendSpec::polynomial(5), Error);
    }

    TEST_CASE("basis evaluation") {
        Eigen::VectorXd x(1);
        x << 3;
        CHECK(eval_basis(TrendSpec::ordinary(), x) == Eigen::VectorXd::Ones(1));
        Eigen::VectorXd e(3);
        e << 1, 3, 9;
        CHECK(eval_basis(TrendSpec::polynomial(2), x) == e);

        Eigen::VectorXd x2(2);
        x2 << 2, 5;
        Eigen::VectorXd e2(3);
        e2 << 1, 2, 5;
        CHECK(eval_basis(TrendSpec::polynomial(1), x2) == e2);
        Eigen::VectorXd e3(6);
        e3 << 1, 2, 5, 4, 10, 25;
        CHECK(eval_basis(TrendSpec::polynomial(2), x2) == e3);
    }

    TEST_CASE("monomial order") {
        const auto m = monomial_exponents(2, 2);
        const std::vector<std::vector<int>> expect{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
        CHECK(m == expect);
    }

    TEST_CASE("information matrix") {
        Eigen::MatrixXd X(3, 1);
        X << 0, 0.5, 1;
        const auto ord = build_information_matrix(TrendSpec::ordinary(), X);
        CHECK(ord.P == 1);
        CHECK(ord.F == Eigen::MatrixXd::Ones(3, 1));
        const auto lin = build_information_matrix(TrendSpec::polynomial(1), X);
        Eigen::MatrixXd e(3, 2);
        e << 1, 0, 1, 0.5, 1, 1;
        CHECK(lin.F == e);
        try {
            build_information_matrix(TrendSpec::polynomial(4), X);
            FAIL("expected throw");
        } catch (const Error& err) {
            CHECK(err.kind() == ErrorKind::UnderdeterminedTrend);
        }
        // enough rows but collinear columns
        Eigen::MatrixXd Xc(4, 2);
        Xc << 0, 0, 1, 1, 2, 2, 3, 3;
        CHECK_THROWS_AS(build_information_matrix(TrendSpec::polynomial(1), Xc), Error);
    }

    TEST_CASE("external basis is the lower model's mean") {
        const FidelityPair p = forrester_doe();
        auto lf = std::make_shared<const KrigingModel>(
            KrigingModel::condition(p.lf, {}, TrendSpec::ordinary(), HyperParams(Eigen::VectorXd::Constant(1, 0.3))));
        const TrendSpec ext = TrendSpec::external(lf);
        const auto info = build_information_matrix(ext, p.hf.X);
        CHECK(info.P == 1);
        for (Eigen::Index i = 0; i < p.hf.n(); ++i) CHECK(info.F(i, 0) == lf->predict(p.hf.X.row(i).transpose()).mean);
        const TrendSpec aug = TrendSpec::external(lf, true);
        CHECK(aug.basis_count(1) == 2);
        CHECK(eval_basis(aug, p.hf.X.row(1).transpose())[0] == 1.0);
        Eigen::MatrixXd X2(2, 2);
        X2.setZero();
        CHECK_THROWS_AS(eval_basis(ext, X2.row(0).transpose()), Error);
    }

    TEST_CASE("reloaded model rebuilds F bit for bit") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(12, 2, [&] { return u(rng); });
        const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(12, [&] { return u(rng); });
        const KrigingModel m = KrigingModel::condition(make_dataset(X, y), {}, TrendSpec::polynomial(2),
                                                       HyperParams(Eigen::VectorXd::Constant(2, 0.4)));
        const auto back = model_from_json(model_to_json(m));
        CHECK(back->training().F == m.training().F);
    }
}
