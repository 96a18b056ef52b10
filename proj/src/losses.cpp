#include "scribkit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scribkit/rng.hpp"

namespace scribkit {

namespace {

void check_shapes(const LogitField& logits, const SparseTarget& target) {
    if (logits.num_classes < 2) throw std::invalid_argument("losses: need at least 2 classes");
    if (static_cast<int64_t>(target.labels.size()) != logits.num_voxels)
        throw std::invalid_argument("losses: target length does not match voxel count");
    for (int32_t l : target.labels)
        if (l != target.ignore && (l < 0 || l >= logits.num_classes))
            throw std::invalid_argument("losses: label out of range");
}

// softmax of one voxel column, written into p[0..C)
void softmax_column(const LogitField& logits, int64_t j, std::vector<double>& p) {
    const int C = logits.num_classes;
    double mx = logits.at(0, j);
    for (int c = 1; c < C; ++c) mx = std::max(mx, logits.at(c, j));
    double sum = 0.0;
    for (int c = 0; c < C; ++c) {
        p[static_cast<size_t>(c)] = std::exp(logits.at(c, j) - mx);
        sum += p[static_cast<size_t>(c)];
    }
    for (int c = 0; c < C; ++c) p[static_cast<size_t>(c)] /= sum;
}

} // namespace

int64_t SparseTarget::labeled_count() const {
    int64_t n = 0;
    for (int32_t l : labels)
        if (l != ignore) ++n;
    return n;
}

std::vector<double> softmax_columns(const LogitField& logits) {
    std::vector<double> out(logits.values.size());
    std::vector<double> p(static_cast<size_t>(logits.num_classes));
    for (int64_t j = 0; j < logits.num_voxels; ++j) {
        softmax_column(logits, j, p);
        for (int c = 0; c < logits.num_classes; ++c)
            out[static_cast<size_t>(c) * logits.num_voxels + j] = p[static_cast<size_t>(c)];
    }
    return out;
}

LossResult partial_cross_entropy(const LogitField& logits, const SparseTarget& target) {
    check_shapes(logits, target);
    const int C = logits.num_classes;
    const int64_t N = logits.num_voxels;

    LossResult out;
    out.grad.assign(logits.values.size(), 0.0);
    const int64_t labeled = target.labeled_count();
    if (labeled == 0) return out;

    const double inv = 1.0 / static_cast<double>(labeled);
    std::vector<double> p(static_cast<size_t>(C));
    double acc = 0.0;
    for (int64_t j = 0; j < N; ++j) {
        const int32_t t = target.labels[static_cast<size_t>(j)];
        if (t == target.ignore) continue;
        softmax_column(logits, j, p);
        acc -= std::log(p[static_cast<size_t>(t)]);
        for (int c = 0; c < C; ++c) {
            const double onehot = c == t ? 1.0 : 0.0;
            out.grad[static_cast<size_t>(c) * N + j] = (p[static_cast<size_t>(c)] - onehot) * inv;
        }
    }
    out.value = acc * inv;
    return out;
}

LossResult partial_dice(const LogitField& logits, const SparseTarget& target, double smooth) {
    check_shapes(logits, target);
    if (smooth < 0) throw std::invalid_argument("partial_dice: smooth must be >= 0");
    const int C = logits.num_classes;
    const int64_t N = logits.num_voxels;

    LossResult out;
    out.grad.assign(logits.values.size(), 0.0);
    const int64_t labeled = target.labeled_count();
    if (labeled == 0) return out;

    // Restricted per-class sums over labeled voxels:
    //   inter_c = sum p_c where target == c, psum_c = sum p_c, tsum_c = #targets == c
    std::vector<double> inter(static_cast<size_t>(C), 0.0);
    std::vector<double> psum(static_cast<size_t>(C), 0.0);
    std::vector<int64_t> tsum(static_cast<size_t>(C), 0);
    std::vector<double> p(static_cast<size_t>(C));
    for (int64_t j = 0; j < N; ++j) {
        const int32_t t = target.labels[static_cast<size_t>(j)];
        if (t == target.ignore) continue;
        softmax_column(logits, j, p);
        for (int c = 0; c < C; ++c) psum[static_cast<size_t>(c)] += p[static_cast<size_t>(c)];
        inter[static_cast<size_t>(t)] += p[static_cast<size_t>(t)];
        ++tsum[static_cast<size_t>(t)];
    }

    int present = 0;
    for (int c = 0; c < C; ++c)
        if (tsum[static_cast<size_t>(c)] > 0) ++present;

    std::vector<double> dice(static_cast<size_t>(C), 0.0);
    std::vector<double> denom(static_cast<size_t>(C), 0.0);
    double mean_dice = 0.0;
    for (int c = 0; c < C; ++c) {
        if (tsum[static_cast<size_t>(c)] == 0) continue;
        denom[static_cast<size_t>(c)] =
            psum[static_cast<size_t>(c)] + static_cast<double>(tsum[static_cast<size_t>(c)]) + smooth;
        dice[static_cast<size_t>(c)] =
            (2.0 * inter[static_cast<size_t>(c)] + smooth) / denom[static_cast<size_t>(c)];
        mean_dice += dice[static_cast<size_t>(c)];
    }
    mean_dice /= static_cast<double>(present);
    out.value = 1.0 - mean_dice;

    // d loss / d p_{c,j} = -(1/P) * (2*t_{c,j} - dice_c) / denom_c for present c,
    // then through the softmax Jacobian per labeled column.
    const double invP = 1.0 / static_cast<double>(present);
    std::vector<double> gp(static_cast<size_t>(C));
    for (int64_t j = 0; j < N; ++j) {
        const int32_t t = target.labels[static_cast<size_t>(j)];
        if (t == target.ignore) continue;
        softmax_column(logits, j, p);
        for (int c = 0; c < C; ++c) {
            if (tsum[static_cast<size_t>(c)] == 0) {
                gp[static_cast<size_t>(c)] = 0.0;
                continue;
            }
            const double onehot = c == t ? 1.0 : 0.0;
            gp[static_cast<size_t>(c)] =
                -invP * (2.0 * onehot - dice[static_cast<size_t>(c)]) / denom[static_cast<size_t>(c)];
        }
        double dot = 0.0;
        for (int c = 0; c < C; ++c) dot += gp[static_cast<size_t>(c)] * p[static_cast<size_t>(c)];
        for (int c = 0; c < C; ++c)
            out.grad[static_cast<size_t>(c) * N + j] =
                p[static_cast<size_t>(c)] * (gp[static_cast<size_t>(c)] - dot);
    }
    return out;
}

LossResult partial_loss(const LogitField& logits, const SparseTarget& target, double w_ce,
                        double w_dice, double smooth) {
    LossResult ce = partial_cross_entropy(logits, target);
    const LossResult dice = partial_dice(logits, target, smooth);
    ce.value = w_ce * ce.value + w_dice * dice.value;
    for (size_t i = 0; i < ce.grad.size(); ++i)
        ce.grad[i] = w_ce * ce.grad[i] + w_dice * dice.grad[i];
    return ce;
}

double finite_diff_check(const LossFn& loss, const LogitField& logits,
                         const SparseTarget& target, double eps, int min_coords,
                         uint64_t seed) {
    if (!(eps > 0)) throw std::invalid_argument("finite_diff_check: eps must be > 0");
    const LossResult analytic = loss(logits, target);

    const int64_t total = static_cast<int64_t>(logits.values.size());
    const int64_t n_check = std::min<int64_t>(total, std::max(min_coords, 0));

    // sample distinct coordinates
    std::vector<int64_t> coords;
    if (n_check == total) {
        coords.resize(static_cast<size_t>(total));
        for (int64_t i = 0; i < total; ++i) coords[static_cast<size_t>(i)] = i;
    } else {
        ScribbleRng rng(mix64(seed ^ 0x5EEDC0DE5EEDC0DEull));
        std::vector<int64_t> pool(static_cast<size_t>(total));
        for (int64_t i = 0; i < total; ++i) pool[static_cast<size_t>(i)] = i;
        for (int64_t i = 0; i < n_check; ++i) {
            const uint64_t j = i + rng.bounded(static_cast<uint64_t>(total - i));
            std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
            coords.push_back(pool[static_cast<size_t>(i)]);
        }
    }

    LogitField work = logits;
    double max_rel = 0.0;
    for (int64_t idx : coords) {
        const double orig = work.values[static_cast<size_t>(idx)];
        work.values[static_cast<size_t>(idx)] = orig + eps;
        const double up = loss(work, target).value;
        work.values[static_cast<size_t>(idx)] = orig - eps;
        const double down = loss(work, target).value;
        work.values[static_cast<size_t>(idx)] = orig;

        const double numeric = (up - down) / (2.0 * eps);
        const double a = analytic.grad[static_cast<size_t>(idx)];
        const double rel =
            std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

} // namespace scribkit
