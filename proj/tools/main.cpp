// scribkit command-line harness: phantom synthesis, batch scribble
// generation, Dice evaluation, annotation statistics, loss verification and
// slice overlays. Exit codes: 0 success, 1 partial failure, 2 invalid input.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "scribkit/config.hpp"
#include "scribkit/losses.hpp"
#include "scribkit/manifest.hpp"
#include "scribkit/metrics.hpp"
#include "scribkit/nifti.hpp"
#include "scribkit/overlay.hpp"
#include "scribkit/phantom.hpp"
#include "scribkit/rng.hpp"
#include "scribkit/scribble.hpp"

namespace fs = std::filesystem;
using namespace scribkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

std::string strip_nifti_ext(std::string name) {
    for (const char* ext : {".gz", ".nii"}) {
        const size_t n = std::string(ext).size();
        if (name.size() > n && name.compare(name.size() - n, n, ext) == 0)
            name.resize(name.size() - n);
    }
    return name;
}

void run_parallel(size_t n, int workers, const std::function<void(size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const size_t count = std::min(static_cast<size_t>(workers), n);
    for (size_t w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

ScribbleConfig resolve_config(const std::string& config_path, const DatasetManifest* manifest,
                              std::optional<uint64_t> seed, std::optional<int> slice_axis) {
    ScribbleConfig cfg = config_path.empty() ? ScribbleConfig{} : load_config(config_path);
    if (manifest) {
        apply_config_overrides(cfg, manifest->config_overrides);
        if (manifest->slice_axis) cfg.slice_axis = *manifest->slice_axis;
    }
    if (seed) cfg.master_seed = *seed;
    if (slice_axis) cfg.slice_axis = *slice_axis;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
    std::string manifest_path;
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
    std::optional<int> slice_axis;
    int workers = default_workers();
};

int cmd_generate(const GenerateOpts& opt) {
    const DatasetManifest manifest = load_manifest(opt.manifest_path);
    const ScribbleConfig cfg =
        resolve_config(opt.config_path, &manifest, opt.seed, opt.slice_axis);
    fs::create_directories(opt.out_dir);

    struct CaseResult {
        std::string error;
        ScribbleStats stats;
    };
    std::vector<CaseResult> results(manifest.cases.size());
    std::mutex log_mutex;

    run_parallel(manifest.cases.size(), opt.workers, [&](size_t i) {
        const std::string& rel = manifest.cases[i];
        try {
            const LabelVolume dense = read_nifti(manifest.case_path(rel));
            const std::string volume_id = strip_nifti_ext(rel);
            const LabelVolume scribbles = generate_volume(dense, cfg, volume_id);

            const fs::path out_path = fs::path(opt.out_dir) / rel;
            fs::create_directories(out_path.parent_path());
            write_nifti(scribbles, out_path.string());

            // re-verify the written file against its reference
            const LabelVolume reread = read_nifti(out_path.string(), scribbles.ignore_label);
            for (size_t v = 0; v < reread.data.size(); ++v)
                if (reread.data[v] != reread.ignore_label && reread.data[v] != dense.data[v])
                    throw std::runtime_error("verification failed: scribble label disagrees "
                                             "with reference at voxel " + std::to_string(v));

            results[i].stats = scribble_stats(reread, dense);
            std::lock_guard lock(log_mutex);
            std::cout << "generated " << rel << " (" << results[i].stats.total_annotated
                      << " annotated voxels)\n";
        } catch (const std::exception& e) {
            results[i].error = e.what();
            std::lock_guard lock(log_mutex);
            std::cerr << "FAILED " << rel << ": " << e.what() << "\n";
        }
    });

    std::ostringstream csv;
    csv << "case,class,annotated_voxels,class_voxels,fraction\r\n";
    for (size_t i = 0; i < manifest.cases.size(); ++i) {
        if (!results[i].error.empty()) continue;
        const std::string esc = csv_escape(manifest.cases[i]);
        for (const auto& pc : results[i].stats.classes) {
            char frac[32];
            std::snprintf(frac, sizeof(frac), "%.6f", pc.fraction);
            csv << esc << ',' << pc.cls << ',' << pc.annotated << ',' << pc.class_voxels << ','
                << frac << "\r\n";
        }
        csv << esc << ",total," << results[i].stats.total_annotated << ",,\r\n";
    }
    write_text_file(fs::path(opt.out_dir) / "scribble_stats.csv", csv.str());
    save_config(cfg, (fs::path(opt.out_dir) / "generation_config.txt").string());

    int failed = 0;
    for (const auto& r : results)
        if (!r.error.empty()) ++failed;
    if (failed > 0) {
        std::cerr << failed << " of " << results.size() << " cases failed\n";
        return kExitPartial;
    }
    return kExitOk;
}

// ----------------------------------------------------------------- phantom

struct PhantomOpts {
    std::string spec_path;
    std::string out_dir;
    int cases = 2;
    uint64_t seed = 0;
};

int cmd_phantom(const PhantomOpts& opt) {
    const PhantomSpec spec =
        opt.spec_path.empty() ? PhantomSpec::builtin_default() : load_phantom_spec(opt.spec_path);
    spec.validate();
    fs::create_directories(opt.out_dir);

    uint32_t max_class = 0;
    for (const auto& s : spec.shapes) max_class = std::max(max_class, s.class_id);

    DatasetManifest manifest;
    manifest.name = "phantoms";
    manifest.root = ".";
    manifest.class_names.push_back("background");
    for (uint32_t c = 1; c <= max_class; ++c)
        manifest.class_names.push_back("class_" + std::to_string(c));

    for (int i = 0; i < opt.cases; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "case_%03d.nii.gz", i);
        ScribbleRng rng = ScribbleRng::derive(opt.seed, "phantom", i, 0, 0);
        const LabelVolume v = synthesize_phantom_jittered(spec, rng);
        write_nifti(v, (fs::path(opt.out_dir) / name).string());
        manifest.cases.emplace_back(name);
        std::cout << "wrote " << name << "\n";
    }

    save_manifest(manifest, (fs::path(opt.out_dir) / "manifest.json").string());
    write_text_file(fs::path(opt.out_dir) / "phantom_spec.json", serialize_phantom_spec(spec));
    return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
    std::vector<std::string> manifest_paths;
    std::string pred_dir;
    std::string out_dir;
    std::string method_name = "prediction";
    int workers = default_workers();
};

int cmd_evaluate(const EvaluateOpts& opt) {
    struct Entry {
        std::string dataset;
        std::string rel;
        std::string ref_path;
        std::vector<uint32_t> classes;
    };
    std::vector<Entry> entries;
    for (const auto& mp : opt.manifest_paths) {
        const DatasetManifest m = load_manifest(mp);
        std::vector<uint32_t> classes;
        for (uint32_t c = 1; c < m.class_names.size(); ++c) classes.push_back(c);
        for (const auto& rel : m.cases)
            entries.push_back({m.name, rel, m.case_path(rel), classes});
    }

    struct Result {
        std::optional<CaseScores> scores;
        std::string error;
        bool missing = false;
    };
    std::vector<Result> results(entries.size());
    std::mutex log_mutex;

    run_parallel(entries.size(), opt.workers, [&](size_t i) {
        const Entry& e = entries[i];
        const fs::path pred_path = fs::path(opt.pred_dir) / e.rel;
        try {
            if (!fs::exists(pred_path)) {
                results[i].missing = true;
                std::lock_guard lock(log_mutex);
                std::cerr << "missing prediction: " << pred_path.string() << "\n";
                return;
            }
            const LabelVolume ref = read_nifti(e.ref_path);
            const LabelVolume pred = read_nifti(pred_path.string());
            results[i].scores = dice_per_class(pred, ref, e.classes, false, e.rel);
        } catch (const std::exception& ex) {
            results[i].error = ex.what();
            std::lock_guard lock(log_mutex);
            std::cerr << "FAILED " << e.rel << ": " << ex.what() << "\n";
        }
    });

    std::vector<CaseScores> scored;
    std::vector<std::string> dataset_of_case;
    int missing = 0, failed = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (results[i].missing) {
            ++missing;
        } else if (!results[i].error.empty()) {
            ++failed;
        } else if (results[i].scores) {
            scored.push_back(*results[i].scores);
            dataset_of_case.push_back(entries[i].dataset);
        }
    }
    if (scored.empty()) {
        std::cerr << "no case could be evaluated\n";
        return kExitInvalid;
    }

    const AggregateReport report = aggregate(scored, dataset_of_case);
    fs::create_directories(opt.out_dir);
    write_text_file(fs::path(opt.out_dir) / "cases.csv", per_case_csv(scored, dataset_of_case));

    std::string summary = summary_csv(report);
    if (missing > 0 || failed > 0)
        summary += "# excluded," + std::to_string(missing) + " missing + " +
                   std::to_string(failed) + " failed\r\n";
    write_text_file(fs::path(opt.out_dir) / "summary.csv", summary);
    write_text_file(fs::path(opt.out_dir) / "summary.md",
                    summary_markdown(report, opt.method_name));

    for (const auto& [ds, mean] : report.dataset_means)
        std::printf("%-20s %.3f\n", ds.c_str(), mean);
    std::printf("%-20s %.3f\n", "mean", report.grand_mean);
    if (missing > 0 || failed > 0) {
        std::cerr << missing << " missing and " << failed << " failed cases were excluded\n";
        return kExitPartial;
    }
    return kExitOk;
}

// ------------------------------------------------------------------- stats

struct StatsOpts {
    std::string manifest_path;
    std::string scribble_dir;
    std::string compare_dir;
    std::string out_csv;
    int workers = default_workers();
};

int cmd_stats(const StatsOpts& opt) {
    const DatasetManifest manifest = load_manifest(opt.manifest_path);

    struct Row {
        std::string error;
        ScribbleStats stats;
        int64_t compare_total = -1;
    };
    std::vector<Row> rows(manifest.cases.size());

    run_parallel(manifest.cases.size(), opt.workers, [&](size_t i) {
        const std::string& rel = manifest.cases[i];
        try {
            const LabelVolume dense = read_nifti(manifest.case_path(rel));
            const LabelVolume s = read_nifti((fs::path(opt.scribble_dir) / rel).string());
            rows[i].stats = scribble_stats(s, dense);
            if (!opt.compare_dir.empty()) {
                const LabelVolume other =
                    read_nifti((fs::path(opt.compare_dir) / rel).string());
                rows[i].compare_total = scribble_stats(other, dense).total_annotated;
            }
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });

    std::ostringstream csv;
    csv << "case,class,annotated_voxels,class_voxels,fraction\r\n";
    int64_t total_a = 0, total_b = 0;
    int failed = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].error.empty()) {
            std::cerr << "FAILED " << manifest.cases[i] << ": " << rows[i].error << "\n";
            ++failed;
            continue;
        }
        const std::string esc = csv_escape(manifest.cases[i]);
        for (const auto& pc : rows[i].stats.classes) {
            char frac[32];
            std::snprintf(frac, sizeof(frac), "%.6f", pc.fraction);
            csv << esc << ',' << pc.cls << ',' << pc.annotated << ',' << pc.class_voxels << ','
                << frac << "\r\n";
        }
        total_a += rows[i].stats.total_annotated;
        if (rows[i].compare_total >= 0) total_b += rows[i].compare_total;
    }

    if (opt.out_csv.empty())
        std::cout << csv.str();
    else
        write_text_file(opt.out_csv, csv.str());

    std::printf("total annotated voxels: %lld\n", static_cast<long long>(total_a));
    if (!opt.compare_dir.empty()) {
        std::printf("compare set total:      %lld\n", static_cast<long long>(total_b));
        std::printf("relative difference:    %s\n",
                    relative_difference(total_a, total_b).c_str());
    }
    return failed > 0 ? kExitPartial : kExitOk;
}

// -------------------------------------------------------------- loss-check

struct LossCheckOpts {
    uint64_t seed = 1;
    int trials = 8;
    int max_classes = 4;
    int max_voxels = 80;
    double fd_eps = 3e-4;
    double threshold_ce = 1e-6;
    double threshold_dice = 1e-5;
    double threshold_pl = 1e-5;
};

int cmd_loss_check(const LossCheckOpts& opt) {
    const double fractions[] = {0.0, 0.3, 0.5, 1.0};
    double max_ce = 0.0, max_dice = 0.0, max_pl = 0.0;

    for (int t = 0; t < opt.trials; ++t) {
        ScribbleRng rng = ScribbleRng::derive(opt.seed, "loss-check", t, 0, 0);
        const int C = rng.uniform_int(2, std::max(2, opt.max_classes));
        const int64_t N = rng.uniform_int(30, std::max(30, opt.max_voxels));
        const double frac = fractions[t % 4];

        LogitField logits(C, N);
        for (auto& v : logits.values) v = rng.uniform(-3.0, 3.0);
        SparseTarget target;
        target.labels.resize(static_cast<size_t>(N), -1);
        for (auto& l : target.labels)
            if (rng.uniform() < frac) l = static_cast<int32_t>(rng.bounded(C));

        if (target.labeled_count() == 0) {
            const LossResult r = partial_loss(logits, target);
            const bool zero = r.value == 0.0;
            std::printf("trial %d (C=%d N=%lld labeled=0): degenerate-%s\n", t, C,
                        static_cast<long long>(N), zero ? "pass" : "FAIL");
            if (!zero) max_pl = 1.0;
            continue;
        }

        const double e_ce = finite_diff_check(
            [](const LogitField& l, const SparseTarget& s) { return partial_cross_entropy(l, s); },
            logits, target, opt.fd_eps, 200, opt.seed + t);
        const double e_dice = finite_diff_check(
            [](const LogitField& l, const SparseTarget& s) { return partial_dice(l, s); },
            logits, target, opt.fd_eps, 200, opt.seed + t);
        const double e_pl = finite_diff_check(
            [](const LogitField& l, const SparseTarget& s) { return partial_loss(l, s); },
            logits, target, opt.fd_eps, 200, opt.seed + t);
        std::printf("trial %d (C=%d N=%lld labeled=%lld): pCE %.3e  pDice %.3e  pL %.3e\n", t, C,
                    static_cast<long long>(N), static_cast<long long>(target.labeled_count()),
                    e_ce, e_dice, e_pl);
        max_ce = std::max(max_ce, e_ce);
        max_dice = std::max(max_dice, e_dice);
        max_pl = std::max(max_pl, e_pl);
    }

    std::printf("max relative gradient error: pCE %.3e (threshold %.1e), "
                "pDice %.3e (%.1e), pL %.3e (%.1e)\n",
                max_ce, opt.threshold_ce, max_dice, opt.threshold_dice, max_pl, opt.threshold_pl);
    const bool ok =
        max_ce < opt.threshold_ce && max_dice < opt.threshold_dice && max_pl < opt.threshold_pl;
    std::printf("loss-check: %s\n", ok ? "PASS" : "FAIL");
    return ok ? kExitOk : kExitPartial;
}

// ----------------------------------------------------------------- overlay

struct OverlayOpts {
    std::string case_path;
    std::string scribble_path;
    int slice = 0;
    std::optional<int> axis;
    std::string out_png;
};

int cmd_overlay(const OverlayOpts& opt) {
    const LabelVolume dense = read_nifti(opt.case_path);
    const LabelVolume scribbles = read_nifti(opt.scribble_path);
    if (dense.dims != scribbles.dims)
        throw std::invalid_argument("overlay: volumes are on different grids");
    const int axis = opt.axis.value_or(2);
    const LabelSlice ds = slice_extract(dense, axis, opt.slice);
    const LabelSlice ss = slice_extract(scribbles, axis, opt.slice);
    write_png(render_overlay(ds, ss, scribbles.ignore_label), opt.out_png);
    std::cout << "wrote " << opt.out_png << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthesize scribble annotations from dense 3D label volumes "
                 "and score segmentation results"};
    app.require_subcommand(1);

    GenerateOpts gen;
    auto* sc_gen = app.add_subcommand("generate", "generate scribble volumes for a dataset");
    sc_gen->add_option("--manifest", gen.manifest_path, "dataset manifest (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sc_gen->add_option("--config", gen.config_path, "generation config file")
        ->check(CLI::ExistingFile);
    sc_gen->add_option("--out", gen.out_dir, "output directory")->required();
    sc_gen->add_option("--seed", gen.seed, "override master seed");
    sc_gen->add_option("--slice-axis", gen.slice_axis, "override slice axis (0|1|2)");
    sc_gen->add_option("--workers", gen.workers, "parallel cases");

    PhantomOpts ph;
    auto* sc_ph = app.add_subcommand("phantom", "synthesize phantom label volumes");
    sc_ph->add_option("--spec", ph.spec_path, "phantom spec (JSON)")->check(CLI::ExistingFile);
    sc_ph->add_option("--out", ph.out_dir, "output directory")->required();
    sc_ph->add_option("--cases", ph.cases, "number of phantoms")->check(CLI::PositiveNumber);
    sc_ph->add_option("--seed", ph.seed, "jitter seed");

    EvaluateOpts ev;
    auto* sc_ev = app.add_subcommand("evaluate", "Dice-score predictions against references");
    sc_ev->add_option("--manifest", ev.manifest_paths, "dataset manifest(s)")
        ->required()
        ->check(CLI::ExistingFile);
    sc_ev->add_option("--pred", ev.pred_dir, "prediction directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    sc_ev->add_option("--out", ev.out_dir, "report directory")->required();
    sc_ev->add_option("--name", ev.method_name, "method name for the report table");
    sc_ev->add_option("--workers", ev.workers, "parallel cases");

    StatsOpts st;
    auto* sc_st = app.add_subcommand("stats", "annotation-density statistics");
    sc_st->add_option("--manifest", st.manifest_path, "dataset manifest")
        ->required()
        ->check(CLI::ExistingFile);
    sc_st->add_option("--scribbles", st.scribble_dir, "scribble directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    sc_st->add_option("--compare", st.compare_dir, "second scribble set to compare totals")
        ->check(CLI::ExistingDirectory);
    sc_st->add_option("--out", st.out_csv, "stats CSV path (stdout when omitted)");
    sc_st->add_option("--workers", st.workers, "parallel cases");

    LossCheckOpts lc;
    auto* sc_lc = app.add_subcommand("loss-check", "finite-difference gradient verification");
    sc_lc->add_option("--seed", lc.seed, "randomization seed");
    sc_lc->add_option("--trials", lc.trials, "number of random problems")
        ->check(CLI::PositiveNumber);
    sc_lc->add_option("--max-classes", lc.max_classes, "largest class count to draw");
    sc_lc->add_option("--max-voxels", lc.max_voxels, "largest voxel count to draw");
    sc_lc->add_option("--eps", lc.fd_eps, "finite-difference step");
    sc_lc->add_option("--threshold-ce", lc.threshold_ce, "max pCE gradient error");
    sc_lc->add_option("--threshold-dice", lc.threshold_dice, "max pDice gradient error");
    sc_lc->add_option("--threshold-pl", lc.threshold_pl, "max pL gradient error");

    OverlayOpts ov;
    auto* sc_ov = app.add_subcommand("overlay", "render a dense/scribble slice overlay PNG");
    sc_ov->add_option("--case", ov.case_path, "dense label volume")
        ->required()
        ->check(CLI::ExistingFile);
    sc_ov->add_option("--scribbles", ov.scribble_path, "scribble volume")
        ->required()
        ->check(CLI::ExistingFile);
    sc_ov->add_option("--slice", ov.slice, "slice index")->required();
    sc_ov->add_option("--axis", ov.axis, "slice axis (default 2)");
    sc_ov->add_option("--out", ov.out_png, "output PNG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (sc_gen->parsed()) return cmd_generate(gen);
        if (sc_ph->parsed()) return cmd_phantom(ph);
        if (sc_ev->parsed()) return cmd_evaluate(ev);
        if (sc_st->parsed()) return cmd_stats(st);
        if (sc_lc->parsed()) return cmd_loss_check(lc);
        if (sc_ov->parsed()) return cmd_overlay(ov);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
