#include <doctest.h>

#include <cmath>
#include <numeric>

#include "poshan/attention.hpp"
#include "poshan/errors.hpp"
#include "poshan/gradcheck.hpp"

using namespace poshan;

namespace {

// a = 1 scalar attention with unit weights and zero bias.
ParameterSet scalar_params(double v = 1.0) {
    ParameterSet params;
    params.add("att.v", Tensor::vector({v}));
    params.add("att.W_h", Tensor::matrix(1, 1, {1}));
    params.add("att.W_q", Tensor::matrix(1, 1, {1}));
    params.add("att.b", Tensor::vector({0}));
    return params;
}

double simplex_error(const Tensor& w, const Mask& mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!mask[i] && w[i] != 0.0) return 1.0;
        if (w[i] < 0.0) return 1.0;
        sum += w[i];
    }
    return std::abs(sum - 1.0);
}

}  // namespace

TEST_CASE("score") {
    AdditiveAttention att("att", 1, 1, 1);
    Graph g;
    SUBCASE("scalar arithmetic") {
        auto params = scalar_params();
        auto e = att.score(g, params, g.constant(Tensor::vector({0.5})), g.constant(Tensor::vector({0.5})));
        CHECK(e.item() == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
        CHECK(e.item() == doctest::Approx(0.76159).epsilon(1e-5));
    }
    SUBCASE("v = 0 gives 0") {
        auto params = scalar_params(0.0);
        CHECK(att.score(g, params, g.constant(Tensor::vector({3})), g.constant(Tensor::vector({-2}))).item() == 0.0);
    }
    SUBCASE("gradient") {
        AdditiveAttention wide("att", 3, 2, 4);
        ParameterSet params;
        Rng rng(4);
        wide.init(params, rng);
        params.get("att.b").value = uniform_tensor({4}, -1, 1, rng);
        Tensor hs = uniform_tensor({3}, -1, 1, rng);
        Tensor q = uniform_tensor({2}, -1, 1, rng);
        auto report = finite_difference_check(
            [&](Graph& h) { return wide.score(h, params, h.constant(hs), h.constant(q)); }, params);
        CHECK(report.passed);
        CHECK(report.entries.size() == 4);
    }
}

TEST_CASE("attend") {
    Graph g;
    SUBCASE("two scalar states") {
        AdditiveAttention att("att", 1, 1, 1);
        auto params = scalar_params();
        // scores tanh(0.5 + 0.5) and tanh(-0.5 + 0.5)
        std::vector<Var> states{g.constant(Tensor::vector({0.5})), g.constant(Tensor::vector({-0.5}))};
        auto r = att.attend(g, params, states, Mask{true, true}, g.constant(Tensor::vector({0.5})));
        const double e0 = std::tanh(1.0);
        const double w0 = std::exp(e0) / (std::exp(e0) + 1.0);
        CHECK(r.weights.value()[0] == doctest::Approx(w0).epsilon(1e-14));
        CHECK(r.weights.value()[0] == doctest::Approx(0.6816).epsilon(1e-4));
        CHECK(r.weights.value()[1] == doctest::Approx(0.3184).epsilon(1e-4));
        CHECK(r.context.item() == doctest::Approx(w0 * 0.5 - (1 - w0) * 0.5).epsilon(1e-14));
    }
    AdditiveAttention att("att", 3, 2, 4);
    ParameterSet params;
    Rng rng(8);
    att.init(params, rng);
    SUBCASE("identical states give uniform weights over unmasked positions") {
        Var s = g.constant(uniform_tensor({3}, -1, 1, rng));
        std::vector<Var> states{s, s, s, s};
        auto r = att.attend(g, params, states, Mask{true, false, true, true}, g.constant(Tensor::vector({1, 2})));
        CHECK(r.weights.value()[1] == 0.0);
        for (std::size_t i : {0, 2, 3}) CHECK(r.weights.value()[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("v = 0 gives uniform weights") {
        params.get("att.v").value.fill(0.0);
        std::vector<Var> states;
        for (int i = 0; i < 5; ++i) states.push_back(g.constant(uniform_tensor({3}, -1, 1, rng)));
        auto r = att.attend(g, params, states, Mask(5, true), g.constant(Tensor::vector({1, 2})));
        for (std::size_t i = 0; i < 5; ++i) CHECK(r.weights.value()[i] == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("simplex over random inputs") {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t k = 1 + rng() % 12;
            std::vector<Var> states;
            Mask mask(k);
            for (std::size_t i = 0; i < k; ++i) {
                states.push_back(g.constant(uniform_tensor({3}, -3, 3, rng)));
                mask[i] = rng() % 4 != 0;
            }
            mask[rng() % k] = true;
            auto r = att.attend(g, params, states, mask, g.constant(uniform_tensor({2}, -3, 3, rng)));
            CHECK(simplex_error(r.weights.value(), mask) <= 1e-9);
        }
    }
    SUBCASE("errors") {
        std::vector<Var> states{g.zeros(3)};
        CHECK_THROWS_AS(att.attend(g, params, states, Mask{false}, g.zeros(2)), EmptyAttentionError);
        CHECK_THROWS_AS(att.attend(g, params, states, Mask{true, true}, g.zeros(2)), DimensionError);
        CHECK_THROWS_AS(att.attend(g, params, states, Mask{true}, g.zeros(3)), DimensionError);
    }
}

TEST_CASE("fuse_weights") {
    Graph g;
    auto c = [&](std::vector<double> v) { return g.constant(Tensor::vector(std::move(v))); };
    SUBCASE("idempotent on identical vectors") {
        std::vector<Var> ws{c({0.2, 0.3, 0.5}), c({0.2, 0.3, 0.5}), c({0.2, 0.3, 0.5})};
        auto f = fuse_weights(g, ws, Mask(3, true)).value();
        for (std::size_t i = 0; i < 3; ++i) CHECK(f[i] == doctest::Approx(ws[0].value()[i]).epsilon(1e-15));
    }
    SUBCASE("arithmetic") {
        std::vector<Var> ws{c({1, 0}), c({0, 1}), c({1, 0})};
        auto f = fuse_weights(g, ws, Mask(2, true)).value();
        CHECK(f[0] == doctest::Approx(2.0 / 3).epsilon(1e-15));
        CHECK(f[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("single vector passes through exactly") {
        std::vector<Var> ws{c({0.25, 0.75, 0})};
        const Tensor fused = fuse_weights(g, ws, Mask{true, true, false}).value();
        CHECK(fused == ws[0].value());
    }
    SUBCASE("simplex and permutation equivariance") {
        Rng rng(12);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t k = 1 + rng() % 10;
            Mask mask(k);
            for (std::size_t i = 0; i < k; ++i) mask[i] = rng() % 3 != 0;
            mask[rng() % k] = true;
            std::vector<std::vector<double>> raw(3, std::vector<double>(k, 0.0));
            std::vector<Var> ws;
            for (auto& r : raw) {
                Tensor scores = uniform_tensor({k}, -4, 4, rng);
                r = g.masked_softmax(g.constant(scores), mask).value().values();
                ws.push_back(c(r));
            }
            auto fused = fuse_weights(g, ws, mask).value();
            CHECK(simplex_error(fused, mask) <= 1e-12);

            std::vector<std::size_t> perm(k);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
            Mask pmask(k);
            std::vector<Var> pws;
            for (std::size_t i = 0; i < k; ++i) pmask[i] = mask[perm[i]];
            for (auto& r : raw) {
                std::vector<double> pr(k);
                for (std::size_t i = 0; i < k; ++i) pr[i] = r[perm[i]];
                pws.push_back(c(pr));
            }
            auto pf = fuse_weights(g, pws, pmask).value();
            for (std::size_t i = 0; i < k; ++i) CHECK(pf[i] == fused[perm[i]]);
        }
    }
    SUBCASE("mask mismatch") {
        std::vector<Var> ws{c({0.5, 0.5}), c({1, 0})};
        CHECK_THROWS_AS(fuse_weights(g, ws, Mask{true, false}), DimensionError);
        std::vector<Var> short_ws{c({1})};
        CHECK_THROWS_AS(fuse_weights(g, short_ws, Mask{true, false}), DimensionError);
        CHECK_THROWS_AS(fuse_weights(g, {}, Mask{true}), DimensionError);
    }
}
