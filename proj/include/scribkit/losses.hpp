#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace scribkit {

/// Logits for C classes over N voxels, stored class-major:
/// values[c * num_voxels + j]. 64-bit throughout; this module is a numerical
/// reference, not a training kernel.
struct LogitField {
    int num_classes = 0;
    int64_t num_voxels = 0;
    std::vector<double> values;

    LogitField() = default;
    LogitField(int classes, int64_t voxels)
        : num_classes(classes),
          num_voxels(voxels),
          values(static_cast<size_t>(classes) * static_cast<size_t>(voxels), 0.0) {}

    double at(int c, int64_t j) const {
        return values[static_cast<size_t>(c) * num_voxels + j];
    }
    double& at(int c, int64_t j) {
        return values[static_cast<size_t>(c) * num_voxels + j];
    }
};

/// Per-voxel class labels; `ignore` marks voxels that contribute nothing.
struct SparseTarget {
    std::vector<int32_t> labels;
    int32_t ignore = -1;

    int64_t labeled_count() const;
};

/// Loss value plus the analytic gradient d loss / d logit, same layout as
/// LogitField. Gradient columns of ignored voxels are exactly zero.
struct LossResult {
    double value = 0.0;
    std::vector<double> grad;
};

/// Per-voxel softmax with max-subtraction; columns sum to 1 within 1e-12.
std::vector<double> softmax_columns(const LogitField& logits);

/// Mean negative log-likelihood over labeled voxels only. Empty labeled set
/// gives value 0 and a zero gradient.
LossResult partial_cross_entropy(const LogitField& logits, const SparseTarget& target);

/// Soft Dice restricted to labeled voxels: 1 minus the mean over classes
/// present in the labeled target of (2*intersection + eps) / (sums + eps).
LossResult partial_dice(const LogitField& logits, const SparseTarget& target,
                        double smooth = 1e-5);

/// Weighted sum w_ce * pCE + w_dice * pDice (the "partial loss").
LossResult partial_loss(const LogitField& logits, const SparseTarget& target,
                        double w_ce = 1.0, double w_dice = 1.0, double smooth = 1e-5);

using LossFn = std::function<LossResult(const LogitField&, const SparseTarget&)>;

/// Central finite differences on a random subsample of at least
/// min_coords coordinates; returns the max relative error with denominator
/// max(|analytic|, |numeric|, 1e-12).
double finite_diff_check(const LossFn& loss, const LogitField& logits,
                         const SparseTarget& target, double eps,
                         int min_coords = 200, uint64_t seed = 0);

} // namespace scribkit
