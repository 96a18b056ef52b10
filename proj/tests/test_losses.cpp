#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "scribkit/losses.hpp"
#include "scribkit/rng.hpp"

using namespace scribkit;

namespace {

constexpr double kFdEps = 3e-4; // conditioning sweet spot for 64-bit central differences

LogitField random_logits(int C, int64_t N, ScribbleRng& rng, double range = 3.0) {
    LogitField f(C, N);
    for (auto& v : f.values) v = rng.uniform(-range, range);
    return f;
}

SparseTarget random_target(int C, int64_t N, double frac, ScribbleRng& rng) {
    SparseTarget t;
    t.labels.assign(static_cast<size_t>(N), -1);
    for (auto& l : t.labels)
        if (rng.uniform() < frac) l = static_cast<int32_t>(rng.bounded(C));
    return t;
}

const LossFn kPce = [](const LogitField& l, const SparseTarget& t) {
    return partial_cross_entropy(l, t);
};
const LossFn kPdice = [](const LogitField& l, const SparseTarget& t) {
    return partial_dice(l, t);
};
const LossFn kPl = [](const LogitField& l, const SparseTarget& t) { return partial_loss(l, t); };

} // namespace

TEST_SUITE_BEGIN("losses");

TEST_CASE("softmax_columns: uniform, saturated, normalized") {
    LogitField f(2, 2);
    f.at(0, 0) = 0;
    f.at(1, 0) = 0;
    f.at(0, 1) = 1000;
    f.at(1, 1) = 0;
    const auto p = softmax_columns(f);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p[3] < 1e-300);
    for (double v : p) CHECK(std::isfinite(v));

    ScribbleRng rng(3);
    const LogitField g = random_logits(3, 5, rng);
    const auto q = softmax_columns(g);
    for (int64_t j = 0; j < 5; ++j) {
        double sum = 0;
        for (int c = 0; c < 3; ++c) sum += q[static_cast<size_t>(c) * 5 + j];
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("partial_cross_entropy: uniform prediction on one labeled voxel") {
    LogitField f(2, 3);
    SparseTarget t;
    t.labels = {-1, 0, -1};
    const LossResult r = partial_cross_entropy(f, t);
    CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(r.grad[0] == 0.0);       // ignored column
    CHECK(r.grad[1] == doctest::Approx(-0.5));
    CHECK(r.grad[1 + 3] == doctest::Approx(0.5));
}

TEST_CASE("partial losses: all-ignore target gives zero value and gradient") {
    ScribbleRng rng(4);
    const LogitField f = random_logits(3, 20, rng);
    SparseTarget t;
    t.labels.assign(20, -1);
    for (const LossFn& fn : {kPce, kPdice, kPl}) {
        const LossResult r = fn(f, t);
        CHECK(r.value == 0.0);
        for (double g : r.grad) CHECK(g == 0.0);
    }
}

TEST_CASE("partial_cross_entropy gradient matches finite differences") {
    ScribbleRng rng(5);
    for (int t = 0; t < 10; ++t) {
        const LogitField f = random_logits(4, 50, rng);
        const SparseTarget target = random_target(4, 50, 0.3, rng);
        if (target.labeled_count() == 0) continue;
        CHECK(finite_diff_check(kPce, f, target, kFdEps, 200, t) < 1e-6);
    }
}

TEST_CASE("partial_dice: perfect one-hot prediction scores ~0") {
    ScribbleRng rng(6);
    const int C = 3;
    const int64_t N = 30;
    LogitField f(C, N);
    SparseTarget t = random_target(C, N, 1.0, rng);
    for (int64_t j = 0; j < N; ++j)
        for (int c = 0; c < C; ++c)
            f.at(c, j) = c == t.labels[static_cast<size_t>(j)] ? 20.0 : -20.0;
    CHECK(partial_dice(f, t, 1e-5).value < 1e-4);
}

TEST_CASE("partial_dice: hand-computed uniform case, smooth = 0") {
    // 4 labeled voxels, all class 1, uniform logits:
    // dice_1 = 2*(0.5*4) / (0.5*4 + 4) = 2/3, loss = 1/3 (class 0 absent)
    LogitField f(2, 6);
    SparseTarget t;
    t.labels = {1, 1, -1, 1, 1, -1};
    const LossResult r = partial_dice(f, t, 0.0);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // brute-force recomputation of the same quantity
    double inter = 0, psum = 0;
    int64_t tsum = 0;
    for (int j : {0, 1, 3, 4}) {
        (void)j;
        inter += 0.5;
        psum += 0.5;
        ++tsum;
    }
    CHECK(r.value ==
          doctest::Approx(1.0 - 2.0 * inter / (psum + static_cast<double>(tsum))).epsilon(1e-12));
}

TEST_CASE("partial_dice gradient matches finite differences") {
    ScribbleRng rng(7);
    for (int t = 0; t < 10; ++t) {
        const LogitField f = random_logits(3, 40, rng);
        const SparseTarget target = random_target(3, 40, 0.5, rng);
        if (target.labeled_count() == 0) continue;
        CHECK(finite_diff_check(kPdice, f, target, kFdEps, 200, t) < 1e-5);
    }
}

TEST_CASE("partial_loss: projections and the dense-oracle equivalence") {
    ScribbleRng rng(8);
    const LogitField f = random_logits(4, 30, rng);
    const SparseTarget t = random_target(4, 30, 0.6, rng);

    const LossResult ce = partial_cross_entropy(f, t);
    const LossResult dice = partial_dice(f, t);
    const LossResult only_ce = partial_loss(f, t, 1.0, 0.0);
    const LossResult only_dice = partial_loss(f, t, 0.0, 1.0);
    CHECK(only_ce.value == ce.value);
    CHECK(only_ce.grad == ce.grad);
    CHECK(only_dice.value == dice.value);
    CHECK(only_dice.grad == dice.grad);

    // fully labeled: equals a dense implementation over all voxels
    for (int trial = 0; trial < 10; ++trial) {
        const int C = 2 + static_cast<int>(rng.bounded(4));
        const int64_t N = 5 + static_cast<int>(rng.bounded(200));
        const LogitField g = random_logits(C, N, rng);
        SparseTarget full = random_target(C, N, 1.0, rng);
        REQUIRE(full.labeled_count() == N);

        const double want_ce = oracles::dense_cross_entropy(g, full.labels);
        const double want_dice = oracles::dense_soft_dice(g, full.labels, 1e-5);
        CHECK(std::abs(partial_cross_entropy(g, full).value - want_ce) < 1e-12);
        CHECK(std::abs(partial_dice(g, full).value - want_dice) < 1e-12);
        CHECK(std::abs(partial_loss(g, full).value - (want_ce + want_dice)) < 1e-12);
    }
}

TEST_CASE("finite_diff_check flags a corrupted gradient") {
    ScribbleRng rng(9);
    const LogitField f = random_logits(3, 30, rng);
    const SparseTarget t = random_target(3, 30, 0.8, rng);
    const LossFn corrupted = [](const LogitField& l, const SparseTarget& s) {
        LossResult r = partial_cross_entropy(l, s);
        r.grad[4] += 0.01;
        return r;
    };
    CHECK(finite_diff_check(corrupted, f, t, kFdEps, static_cast<int>(f.values.size()), 0) > 1e-3);
}

TEST_CASE("ignore-invariance: perturbing ignored columns changes nothing") {
    ScribbleRng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const int C = 2 + static_cast<int>(rng.bounded(3));
        const int64_t N = 40;
        const LogitField f = random_logits(C, N, rng);
        const SparseTarget t = random_target(C, N, 0.5, rng);

        LogitField perturbed = f;
        for (int64_t j = 0; j < N; ++j) {
            if (t.labels[static_cast<size_t>(j)] != t.ignore) continue;
            for (int c = 0; c < C; ++c) perturbed.at(c, j) += rng.uniform(-100.0, 100.0);
        }
        for (const LossFn& fn : {kPce, kPdice, kPl}) {
            const LossResult a = fn(f, t);
            const LossResult b = fn(perturbed, t);
            CHECK(a.value == b.value); // bitwise: ignored columns are never read
            CHECK(a.grad == b.grad);
        }
    }
}

TEST_CASE("permutation invariance of the loss values") {
    ScribbleRng rng(11);
    const int C = 3;
    const int64_t N = 60;
    const LogitField f = random_logits(C, N, rng);
    const SparseTarget t = random_target(C, N, 0.7, rng);

    std::vector<int64_t> perm(N);
    for (int64_t j = 0; j < N; ++j) perm[static_cast<size_t>(j)] = j;
    for (int64_t j = N - 1; j > 0; --j)
        std::swap(perm[static_cast<size_t>(j)],
                  perm[static_cast<size_t>(rng.bounded(static_cast<uint64_t>(j + 1)))]);

    LogitField g(C, N);
    SparseTarget u;
    u.labels.resize(static_cast<size_t>(N));
    for (int64_t j = 0; j < N; ++j) {
        u.labels[static_cast<size_t>(j)] = t.labels[static_cast<size_t>(perm[j])];
        for (int c = 0; c < C; ++c) g.at(c, j) = f.at(c, perm[j]);
    }
    for (const LossFn& fn : {kPce, kPdice, kPl})
        CHECK(std::abs(fn(f, t).value - fn(g, u).value) < 1e-12);
}

TEST_CASE("pCE gradient sums to zero over classes at every labeled column") {
    ScribbleRng rng(12);
    const LogitField f = random_logits(5, 50, rng);
    const SparseTarget t = random_target(5, 50, 0.5, rng);
    const LossResult r = partial_cross_entropy(f, t);
    for (int64_t j = 0; j < 50; ++j) {
        double colsum = 0;
        for (int c = 0; c < 5; ++c) colsum += r.grad[static_cast<size_t>(c) * 50 + j];
        CHECK(std::abs(colsum) < 1e-12);
    }
}

TEST_CASE("gradient descent on the partial loss strictly decreases it") {
    ScribbleRng rng(13);
    LogitField f = random_logits(2, 100, rng);
    const SparseTarget t = random_target(2, 100, 0.5, rng);
    REQUIRE(t.labeled_count() > 0);
    double prev = partial_loss(f, t).value;
    for (int step = 0; step < 200; ++step) {
        const LossResult r = partial_loss(f, t);
        for (size_t i = 0; i < f.values.size(); ++i) f.values[i] -= 0.5 * r.grad[i];
        const double cur = partial_loss(f, t).value;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("shape and label validation") {
    LogitField f(3, 4);
    SparseTarget bad;
    bad.labels = {0, 1, 3, -1}; // 3 >= C
    CHECK_THROWS_AS(partial_cross_entropy(f, bad), std::invalid_argument);
    CHECK_THROWS_AS(partial_dice(f, bad), std::invalid_argument);
    SparseTarget wrong_len;
    wrong_len.labels = {0, 1};
    CHECK_THROWS_AS(partial_cross_entropy(f, wrong_len), std::invalid_argument);
}

TEST_SUITE_END();
