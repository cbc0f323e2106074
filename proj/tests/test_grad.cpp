#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "poshan/errors.hpp"
#include "poshan/gradcheck.hpp"
#include "poshan/graph.hpp"

using namespace poshan;

namespace {

void check_close(const Tensor& t, std::vector<double> expected, double tol = 1e-12) {
    REQUIRE(t.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(t[i] == doctest::Approx(expected[i]).epsilon(tol));
}

}  // namespace

TEST_CASE("affine") {
    Graph g;
    SUBCASE("identity") {
        auto y = g.affine(g.constant(Tensor::vector({3, -1})), g.constant(Tensor::matrix(2, 2, {1, 0, 0, 1})),
                          g.zeros(2));
        check_close(y.value(), {3, -1});
    }
    SUBCASE("zero weights") {
        auto y = g.affine(g.constant(Tensor::vector({7, 8, 9})), g.constant(Tensor::zeros(2, 3)),
                          g.constant(Tensor::vector({5, 5})));
        check_close(y.value(), {5, 5});
    }
    SUBCASE("hand arithmetic") {
        auto y = g.affine(g.constant(Tensor::vector({1, 1})), g.constant(Tensor::matrix(2, 2, {1, 2, 3, 4})),
                          g.constant(Tensor::vector({1, 1})));
        check_close(y.value(), {4, 8});
    }
    SUBCASE("shape mismatch names both shapes") {
        try {
            g.affine(g.constant(Tensor::vector({1, 1, 1})), g.constant(Tensor::zeros(2, 2)), g.zeros(2));
            FAIL("expected DimensionError");
        } catch (const DimensionError& e) {
            std::string msg = e.what();
            CHECK(msg.find("[2x2]") != std::string::npos);
            CHECK(msg.find("[3]") != std::string::npos);
        }
    }
}

TEST_CASE("elementwise and reduction ops") {
    Graph g;
    check_close(g.tanh(g.zeros(2)).value(), {0, 0});
    auto a = g.constant(Tensor::vector({2, 0}));
    auto b = g.constant(Tensor::vector({0, 2}));
    std::vector<Var> vs{a, b};
    check_close(g.weighted_sum(g.constant(Tensor::vector({0.5, 0.5})), vs).value(), {1, 1});
    check_close(g.concat(g.constant(Tensor::vector({1, 2})), g.constant(Tensor::vector({3}))).value(), {1, 2, 3});
    check_close(g.sum_vectors(vs).value(), {2, 2});
    check_close(g.hadamard(a, g.constant(Tensor::vector({3, 4}))).value(), {6, 0});
    check_close(g.sigmoid(g.zeros(1)).value(), {0.5});
    CHECK_THROWS_AS(g.weighted_sum(g.constant(Tensor::vector({1})), vs), DimensionError);
    CHECK_THROWS_AS(g.add(a, g.zeros(3)), DimensionError);
}

TEST_CASE("weighted_sum with one-hot weights selects exactly") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        Graph g;
        std::vector<Var> vs;
        for (int k = 0; k < 5; ++k) {
            std::vector<double> v(4);
            for (auto& x : v) x = normal(rng);
            vs.push_back(g.constant(Tensor::vector(v)));
        }
        std::size_t pick = trial % 5;
        std::vector<double> w(5, 0.0);
        w[pick] = 1.0;
        auto out = g.weighted_sum(g.constant(Tensor::vector(w)), vs);
        CHECK(out.value() == vs[pick].value());
    }
}

TEST_CASE("masked_softmax") {
    Graph g;
    check_close(g.masked_softmax(g.zeros(2), {true, true}).value(), {0.5, 0.5});

    // Direct scalar oracle: exp/normalize over the unmasked entries.
    const double e1 = std::exp(1.0), e2 = std::exp(2.0);
    auto y = g.masked_softmax(g.constant(Tensor::vector({1, 2, 3})), {true, true, false});
    check_close(y.value(), {e1 / (e1 + e2), e2 / (e1 + e2), 0.0});
    CHECK(y.value()[0] == doctest::Approx(0.26894).epsilon(1e-4));
    CHECK(y.value()[2] == 0.0);

    auto big = g.masked_softmax(g.constant(Tensor::vector({1000, 999})), {true, true});
    CHECK(big.value().all_finite());
    CHECK(big.value()[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-12));
    CHECK(big.value()[0] == doctest::Approx(0.73106).epsilon(1e-4));

    CHECK_THROWS_AS(g.masked_softmax(g.zeros(2), {false, false}), EmptyAttentionError);
}

TEST_CASE("masked_softmax property: simplex over unmasked positions") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> len(1, 64);
    std::normal_distribution<double> normal(0.0, 20.0);
    std::bernoulli_distribution coin(0.6);
    for (int trial = 0; trial < 500; ++trial) {
        const int k = len(rng);
        std::vector<double> s(k);
        Mask m(k);
        for (int i = 0; i < k; ++i) {
            s[i] = normal(rng);
            m[i] = coin(rng);
        }
        m[std::uniform_int_distribution<int>(0, k - 1)(rng)] = true;
        Graph g;
        auto y = g.masked_softmax(g.constant(Tensor::vector(s)), m).value();
        double total = 0.0;
        for (int i = 0; i < k; ++i) {
            CHECK(y[i] >= 0.0);
            if (!m[i]) CHECK(y[i] == 0.0);
            total += y[i];
        }
        CHECK(std::abs(total - 1.0) <= 1e-9);
    }
}

TEST_CASE("softmax cross entropy") {
    Graph g;
    CHECK(g.softmax_cross_entropy(g.zeros(2), 0).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // log(1 + e^-20)
    CHECK(g.softmax_cross_entropy(g.constant(Tensor::vector({10, -10})), 0).item() ==
          doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-9));
    CHECK(std::log1p(std::exp(-20.0)) == doctest::Approx(2.06e-9).epsilon(1e-2));

    ParameterSet ps;
    auto& logits = ps.add("logits", Tensor::zeros(2));
    Graph h;
    auto grads = h.backward(h.softmax_cross_entropy(h.parameter(logits), 1));
    check_close(grads.at("logits"), {0.5, -0.5});

    CHECK_THROWS_AS(g.softmax_cross_entropy(g.zeros(2), 2), LabelRangeError);
}

TEST_CASE("backward") {
    SUBCASE("sum(Wx) gives outer-product gradient, none for constant x") {
        ParameterSet ps;
        auto& W = ps.add("W", Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
        Graph g;
        auto x = g.constant(Tensor::vector({0.5, -1, 2}));
        auto grads = g.backward(g.sum_elements(g.matvec(g.parameter(W), x)));
        check_close(grads.at("W"), {0.5, -1, 2, 0.5, -1, 2});
        CHECK(grads.size() == 1);
    }
    SUBCASE("constant loss yields zero gradients") {
        ParameterSet ps;
        auto& W = ps.add("W", Tensor::vector({1, 2}));
        Graph g;
        g.parameter(W);
        auto grads = g.backward(g.constant(Tensor::scalar(3.0)));
        check_close(grads.at("W"), {0, 0});
    }
    SUBCASE("non-scalar loss is rejected") {
        Graph g;
        CHECK_THROWS_AS(g.backward(g.zeros(2)), NonScalarLossError);
    }
    SUBCASE("frozen parameters get no gradient") {
        ParameterSet ps;
        auto& W = ps.add("W", Tensor::vector({1, 2}), false);
        Graph g;
        auto grads = g.backward(g.sum_elements(g.parameter(W)));
        CHECK(grads.empty());
    }
}

TEST_CASE("shared node gradients accumulate additively") {
    ParameterSet ps;
    auto& W = ps.add("W", Tensor::matrix(2, 2, {0.3, -0.2, 0.5, 0.1}));
    const Tensor x = Tensor::vector({0.7, -1.3});

    // Node h consumed twice versus each consumer alone.
    auto both = [&](Graph& g) {
        auto h = g.tanh(g.matvec(g.parameter(W), g.constant(x)));
        return g.add(g.dot(h, h), g.sum_elements(h));
    };
    auto first = [&](Graph& g) {
        auto h = g.tanh(g.matvec(g.parameter(W), g.constant(x)));
        return g.dot(h, h);
    };
    auto second = [&](Graph& g) {
        auto h = g.tanh(g.matvec(g.parameter(W), g.constant(x)));
        return g.sum_elements(h);
    };
    auto grad_of = [](auto& fn) {
        Graph g;
        return g.backward(fn(g)).at("W");
    };
    Tensor combined = grad_of(both);
    Tensor sum = grad_of(first);
    sum.add_inplace(grad_of(second));
    for (std::size_t i = 0; i < sum.size(); ++i) CHECK(combined[i] == doctest::Approx(sum[i]).epsilon(1e-14));

    auto report = finite_difference_check(both, ps);
    CHECK(report.passed);
    CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("finite difference check") {
    ParameterSet ps;
    Rng rng(5);
    auto& W = ps.add("W", uniform_tensor({3, 4}, -0.5, 0.5, rng));
    auto& b = ps.add("b", uniform_tensor({3}, -0.5, 0.5, rng));
    auto& V = ps.add("V", uniform_tensor({2, 3}, -0.5, 0.5, rng));
    auto& c = ps.add("c", uniform_tensor({2}, -0.5, 0.5, rng));
    const Tensor x = Tensor::vector({0.2, -0.4, 1.1, 0.05});
    auto toy = [&](Graph& g) {
        auto h = g.tanh(g.affine(g.constant(x), g.parameter(W), g.parameter(b)));
        auto z = g.affine(h, g.parameter(V), g.parameter(c));
        return g.softmax_cross_entropy(z, 1);
    };

    SUBCASE("affine + tanh + cross-entropy toy") {
        auto report = finite_difference_check(toy, ps);
        CHECK(report.passed);
        CHECK(report.max_rel_error < 1e-4);
        CHECK(report.entries.size() == 4);
        std::ostringstream tsv;
        report.write_tsv(tsv);
        CHECK(tsv.str().find("W\t") != std::string::npos);
    }
    SUBCASE("zero-parameter model") {
        ParameterSet empty;
        auto report = finite_difference_check([](Graph& g) { return g.constant(Tensor::scalar(1.0)); }, empty);
        CHECK(report.entries.empty());
        CHECK(report.passed);
    }
    SUBCASE("corrupted gradient is caught and named") {
        GradcheckOptions opts;
        opts.tamper = [](Gradients& grads) { grads.at("b")[1] += 0.1; };
        auto report = finite_difference_check(toy, ps, opts);
        CHECK_FALSE(report.passed);
        REQUIRE(report.failures().size() == 1);
        CHECK(report.failures()[0] == "b");
    }
    SUBCASE("non-deterministic forward") {
        int calls = 0;
        auto flaky = [&](Graph& g) {
            ++calls;
            return g.add(toy(g), g.constant(Tensor::scalar(calls * 1e-3)));
        };
        CHECK_THROWS_AS(finite_difference_check(flaky, ps), DeterminismError);
    }
    SUBCASE("epsilon range") {
        GradcheckOptions opts;
        opts.epsilon = 0.5;
        CHECK_THROWS_AS(finite_difference_check(toy, ps, opts), ConfigError);
    }
}

TEST_CASE("large tensors are sampled") {
    ParameterSet ps;
    Rng rng(3);
    auto& W = ps.add("W", uniform_tensor({80, 60}, -0.1, 0.1, rng));
    Tensor x = uniform_tensor({60}, -1, 1, rng);
    auto loss = [&](Graph& g) { return g.sum_elements(g.tanh(g.matvec(g.parameter(W), g.constant(x)))); };
    auto report = finite_difference_check(loss, ps);
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].checked == 256);
    CHECK(report.passed);
}

TEST_CASE("parameter set") {
    ParameterSet ps;
    ps.add("a", Tensor::zeros(2));
    CHECK_THROWS_AS(ps.add("a", Tensor::zeros(2)), ConfigError);
    CHECK_THROWS_AS(Tensor({2}, {1.0, 2.0, 3.0}), DimensionError);
    Tensor bad = Tensor::vector({1.0, std::nan("")});
    CHECK_FALSE(bad.all_finite());
    CHECK_THROWS(bad.check_finite("bad"));
    Gradients grads{{"a", Tensor::vector({8, 6})}};
    CHECK(global_norm(grads) == doctest::Approx(10.0));
}
