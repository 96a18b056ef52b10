#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scribkit/volume.hpp"

namespace scribkit {

/// Per-case Dice. A class absent from both volumes is undefined and excluded
/// from the case mean.
struct CaseScores {
    std::string case_id;
    std::vector<std::pair<uint32_t, std::optional<double>>> per_class;
    std::optional<double> mean;
};

/// Per-class annotation density of a scribble volume against its dense
/// reference.
struct ScribbleStats {
    struct PerClass {
        uint32_t cls = 0;
        int64_t annotated = 0;
        int64_t class_voxels = 0;
        double fraction = 0.0;
    };
    std::vector<PerClass> classes;
    int64_t total_annotated = 0;
};

struct AggregateReport {
    std::vector<std::pair<std::string, double>> dataset_means; // insertion order
    double grand_mean = 0.0;
    int64_t cases = 0;
};

/// Dice per class: 2|P∩R| / (|P|+|R|). Classes to score are taken from
/// `classes`; when empty, every label present in either volume is scored,
/// excluding the reference's ignore label and, unless include_background,
/// class 0.
CaseScores dice_per_class(const LabelVolume& pred, const LabelVolume& ref,
                          std::vector<uint32_t> classes = {},
                          bool include_background = false,
                          const std::string& case_id = "");

ScribbleStats scribble_stats(const LabelVolume& scribbles, const LabelVolume& dense);

/// Dataset mean = mean of case means; grand mean = unweighted mean over
/// dataset means. `dataset_of_case` pairs each CaseScores with its dataset
/// label. Rounding happens only at presentation.
AggregateReport aggregate(const std::vector<CaseScores>& per_case,
                          const std::vector<std::string>& dataset_of_case);

/// Relative difference of two totals formatted like "+71%" / "-12%".
std::string relative_difference(int64_t base, int64_t other);

// --- report serialization -------------------------------------------------

/// RFC-4180 field escaping.
std::string csv_escape(const std::string& field);

/// "case,class,dice" rows, one per defined or undefined class score.
std::string per_case_csv(const std::vector<CaseScores>& cases,
                         const std::vector<std::string>& dataset_of_case);

/// "dataset,mean_dice,cases" plus a grand-mean row.
std::string summary_csv(const AggregateReport& report);

/// Markdown table with one column per dataset and Mean last.
std::string summary_markdown(const AggregateReport& report, const std::string& method_name);

} // namespace scribkit
