#include "scribkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace scribkit {

CaseScores dice_per_class(const LabelVolume& pred, const LabelVolume& ref,
                          std::vector<uint32_t> classes, bool include_background,
                          const std::string& case_id) {
    if (pred.dims != ref.dims)
        throw std::invalid_argument("dice_per_class: volume extents differ");

    if (classes.empty()) {
        std::set<uint32_t> all;
        for (uint32_t l : pred.data) all.insert(l);
        for (uint32_t l : ref.data) all.insert(l);
        all.erase(ref.ignore_label);
        if (!include_background) all.erase(0u);
        classes.assign(all.begin(), all.end());
    }

    std::map<uint32_t, std::array<int64_t, 3>> counts; // |P|, |R|, |P∩R|
    for (uint32_t c : classes) counts[c] = {0, 0, 0};
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const uint32_t p = pred.data[i], r = ref.data[i];
        auto ip = counts.find(p);
        if (ip != counts.end()) {
            ++ip->second[0];
            if (p == r) ++ip->second[2];
        }
        auto ir = counts.find(r);
        if (ir != counts.end()) ++ir->second[1];
    }

    CaseScores out;
    out.case_id = case_id;
    double sum = 0.0;
    int defined = 0;
    for (uint32_t c : classes) {
        const auto& [np, nr, ni] = counts[c];
        if (np + nr == 0) {
            out.per_class.emplace_back(c, std::nullopt);
        } else {
            const double d = 2.0 * static_cast<double>(ni) / static_cast<double>(np + nr);
            out.per_class.emplace_back(c, d);
            sum += d;
            ++defined;
        }
    }
    if (defined > 0) out.mean = sum / defined;
    return out;
}

ScribbleStats scribble_stats(const LabelVolume& scribbles, const LabelVolume& dense) {
    if (scribbles.dims != dense.dims)
        throw std::invalid_argument("scribble_stats: volume extents differ");

    std::map<uint32_t, std::pair<int64_t, int64_t>> counts; // annotated, class voxels
    for (uint32_t c : dense.present_labels()) counts[c] = {0, 0};

    ScribbleStats out;
    for (size_t i = 0; i < dense.data.size(); ++i) {
        const uint32_t d = dense.data[i];
        if (d != dense.ignore_label) ++counts[d].second;
        const uint32_t s = scribbles.data[i];
        if (s != scribbles.ignore_label) {
            ++out.total_annotated;
            auto it = counts.find(s);
            if (it != counts.end()) ++it->second.first;
        }
    }
    for (const auto& [cls, pair] : counts) {
        ScribbleStats::PerClass pc;
        pc.cls = cls;
        pc.annotated = pair.first;
        pc.class_voxels = pair.second;
        pc.fraction = pair.second > 0
                          ? static_cast<double>(pair.first) / static_cast<double>(pair.second)
                          : 0.0;
        out.classes.push_back(pc);
    }
    return out;
}

AggregateReport aggregate(const std::vector<CaseScores>& per_case,
                          const std::vector<std::string>& dataset_of_case) {
    if (per_case.empty()) throw std::invalid_argument("aggregate: no cases");
    if (per_case.size() != dataset_of_case.size())
        throw std::invalid_argument("aggregate: dataset label per case required");

    std::vector<std::string> order;
    std::map<std::string, std::pair<double, int64_t>> acc; // sum of case means, count
    for (size_t i = 0; i < per_case.size(); ++i) {
        const std::string& ds = dataset_of_case[i];
        if (!acc.count(ds)) order.push_back(ds);
        if (per_case[i].mean) {
            acc[ds].first += *per_case[i].mean;
            acc[ds].second += 1;
        } else {
            acc[ds]; // dataset exists even if the case had no defined class
        }
    }

    AggregateReport report;
    report.cases = static_cast<int64_t>(per_case.size());
    double sum = 0.0;
    int64_t groups = 0;
    for (const std::string& ds : order) {
        const auto& [s, n] = acc[ds];
        if (n == 0) throw std::invalid_argument("aggregate: dataset '" + ds +
                                                "' has no case with a defined score");
        const double mean = s / static_cast<double>(n);
        report.dataset_means.emplace_back(ds, mean);
        sum += mean;
        ++groups;
    }
    report.grand_mean = sum / static_cast<double>(groups);
    return report;
}

std::string relative_difference(int64_t base, int64_t other) {
    if (base == 0) return "n/a";
    const double rel = 100.0 * (static_cast<double>(other) - static_cast<double>(base)) /
                       static_cast<double>(base);
    const long rounded = std::lround(rel);
    std::ostringstream out;
    if (rounded >= 0) out << '+';
    out << rounded << '%';
    return out.str();
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string per_case_csv(const std::vector<CaseScores>& cases,
                         const std::vector<std::string>& dataset_of_case) {
    std::ostringstream out;
    out << "dataset,case,class,dice\r\n";
    for (size_t i = 0; i < cases.size(); ++i) {
        for (const auto& [cls, dice] : cases[i].per_class) {
            out << csv_escape(dataset_of_case[i]) << ',' << csv_escape(cases[i].case_id) << ','
                << cls << ',' << (dice ? fmt_full(*dice) : "undefined") << "\r\n";
        }
    }
    return out.str();
}

std::string summary_csv(const AggregateReport& report) {
    std::ostringstream out;
    out << "dataset,mean_dice\r\n";
    for (const auto& [ds, mean] : report.dataset_means)
        out << csv_escape(ds) << ',' << fmt_full(mean) << "\r\n";
    out << "mean," << fmt_full(report.grand_mean) << "\r\n";
    return out.str();
}

std::string summary_markdown(const AggregateReport& report, const std::string& method_name) {
    std::ostringstream out;
    out << "| Method |";
    for (const auto& [ds, _] : report.dataset_means) out << ' ' << ds << " |";
    out << " Mean |\n|---|";
    for (size_t i = 0; i < report.dataset_means.size(); ++i) out << "---|";
    out << "---|\n| " << method_name << " |";
    for (const auto& [_, mean] : report.dataset_means) out << ' ' << fmt3(mean) << " |";
    out << ' ' << fmt3(report.grand_mean) << " |\n";
    return out.str();
}

} // namespace scribkit
