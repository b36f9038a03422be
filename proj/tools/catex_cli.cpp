#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "catex/dataset.hpp"
#include "catex/descriptor.hpp"
#include "catex/errors.hpp"
#include "catex/features_io.hpp"
#include "catex/formal.hpp"
#include "catex/image_io.hpp"
#include "catex/learn.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitVerification = 4;

int default_jobs() {
    if (const char* env = std::getenv("CATEX_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct ExtractArgs {
    std::string manifest_path;
    std::string output;
    double alpha = 0.10;
    int iterations = 20;
    std::string schedule = "8:1,16:2,24:3,24:4,24:5,24:6,24:7,24:8,24:9";
    int jobs = default_jobs();
};

int run_extract(const ExtractArgs& args) {
    catex::CatexConfig config;
    config.alpha = args.alpha;
    config.iterations = args.iterations;
    config.schedule = catex::io::parse_schedule(args.schedule);
    config.validate();

    const auto manifest = catex::dataset::load_manifest(args.manifest_path);
    const std::size_t n = manifest.entries.size();

    std::vector<std::vector<double>> rows(n);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                const catex::GrayImage image = catex::io::load_image(manifest.entries[i].path);
                rows[i] = catex::extract(image, config).values;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                    std::fprintf(stderr, "\nextraction failed for %s\n",
                                 manifest.entries[i].path.c_str());
                }
                return;
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            std::fprintf(stderr, "\r%zu/%zu", finished, n);
        }
    };

    const int jobs = std::max(1, std::min<int>(args.jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    std::fprintf(stderr, "\n");
    if (first_error)
        std::rethrow_exception(first_error);

    catex::io::FeatureFile file;
    file.config = config;
    file.has_tags = manifest.has_tags;
    for (const auto& entry : manifest.entries) {
        file.paths.push_back(entry.path);
        file.labels.push_back(entry.label);
        file.tags.push_back(entry.sample_tag);
    }
    file.values = std::move(rows);
    catex::io::write_features(args.output, file);
    std::cout << "features_written=" << args.output << " rows=" << n << " dim="
              << file.dimension() << "\n";
    return kExitOk;
}

struct EvaluateArgs {
    std::string features_path;
    std::string protocol = "random-half";
    int rounds = 10;
    int folds = 5;
    std::uint64_t seed = 0;
    std::string classifier = "lda";
    std::vector<int> pca_grid = {10, 20, 40, 80, 120, 160, 200};
    bool grid_is_default = true;
    std::string output = "confusion.csv";
    bool self_test = false;
};

void write_confusion(const catex::learn::ConfusionMatrix& cm, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw catex::IoError("cannot write confusion matrix: " + path);
    out << "label";
    for (const auto& l : cm.labels)
        out << "," << l;
    out << "\n";
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out << cm.labels[i];
        for (std::size_t j = 0; j < cm.labels.size(); ++j)
            out << "," << cm.counts[i][j];
        out << "\n";
    }
}

/// Largest PCA dimension feasible in every nested fold, used to cap the
/// default candidate grid.
int feasible_k_max(const std::vector<std::string>& train_labels, int folds, std::uint64_t seed,
                   int dim) {
    const auto fold_of = catex::learn::stratified_folds(train_labels, folds, seed);
    int k_max = dim;
    for (int f = 0; f < folds; ++f) {
        int train_count = 0;
        for (int fo : fold_of)
            train_count += fo != f ? 1 : 0;
        k_max = std::min(k_max, train_count - 1);
    }
    return k_max;
}

int run_evaluate(const EvaluateArgs& args) {
    const catex::io::FeatureFile file = catex::io::read_features(args.features_path);
    const std::size_t n = file.values.size();
    const std::size_t dim = file.dimension();

    catex::dataset::DatasetManifest manifest;
    manifest.name = args.features_path;
    manifest.has_tags = file.has_tags;
    for (std::size_t i = 0; i < n; ++i)
        manifest.entries.push_back({file.paths[i], file.labels[i], file.tags[i]});
    if (manifest.distinct_labels().size() < 2)
        throw catex::ValidationError("evaluate: need at least 2 classes");

    Eigen::MatrixXd all(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            all(i, j) = file.values[i][j];

    std::vector<catex::dataset::Split> splits;
    if (args.self_test) {
        catex::dataset::Split split;
        for (std::size_t i = 0; i < n; ++i) {
            split.train.push_back(i);
            split.test.push_back(i);
        }
        splits.push_back(std::move(split));
    } else {
        catex::dataset::SplitSpec spec;
        spec.protocol = catex::dataset::parse_protocol(args.protocol);
        spec.rounds = args.rounds;
        spec.seed = args.seed;
        splits = catex::dataset::make_splits(manifest, spec);
    }

    std::cout << "protocol=" << (args.self_test ? "self-test" : args.protocol)
              << " rounds=" << splits.size() << " seed=" << args.seed
              << " classifier=" << args.classifier << " folds=" << args.folds << "\n";

    std::vector<double> accuracies;
    catex::learn::ConfusionMatrix aggregate;
    for (std::size_t round = 0; round < splits.size(); ++round) {
        const auto& split = splits[round];
        Eigen::MatrixXd train(split.train.size(), dim);
        std::vector<std::string> train_labels(split.train.size());
        for (std::size_t i = 0; i < split.train.size(); ++i) {
            train.row(i) = all.row(static_cast<Eigen::Index>(split.train[i]));
            train_labels[i] = file.labels[split.train[i]];
        }

        std::vector<std::string> predictions, truths;
        int chosen_k = 0;
        if (args.classifier == "lda") {
            const std::uint64_t fold_seed = catex::mix_seed(args.seed, 0x5e1ec7 + round);
            std::vector<int> grid = args.pca_grid;
            if (args.grid_is_default) {
                const int k_max =
                    feasible_k_max(train_labels, args.folds, fold_seed, static_cast<int>(dim));
                for (int& k : grid)
                    k = std::min(k, k_max);
                std::sort(grid.begin(), grid.end());
                grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
                while (!grid.empty() && grid.front() < 1)
                    grid.erase(grid.begin());
            }
            chosen_k = catex::learn::select_components(train, train_labels, grid, args.folds,
                                                       fold_seed);
            const auto pca = catex::learn::pca_fit(train, chosen_k);
            const auto lda = catex::learn::lda_fit(catex::learn::pca_transform(pca, train),
                                                   train_labels);
            for (std::size_t t : split.test) {
                const Eigen::VectorXd projected = catex::learn::pca_transform(
                    pca, Eigen::VectorXd(all.row(static_cast<Eigen::Index>(t)).transpose()));
                predictions.push_back(catex::learn::lda_predict(lda, projected));
                truths.push_back(file.labels[t]);
            }
        } else if (args.classifier == "knn") {
            for (std::size_t t : split.test) {
                predictions.push_back(catex::learn::knn_predict(
                    train, train_labels,
                    Eigen::VectorXd(all.row(static_cast<Eigen::Index>(t)).transpose())));
                truths.push_back(file.labels[t]);
            }
        } else {
            throw catex::ValidationError("unknown classifier '" + args.classifier + "'");
        }

        const auto cm = catex::learn::evaluate(predictions, truths);
        accuracies.push_back(cm.accuracy());
        aggregate = catex::learn::merge(aggregate, cm);
        std::cout << "round=" << round;
        if (args.classifier == "lda")
            std::cout << " k=" << chosen_k;
        std::cout << " accuracy=" << catex::io::format_double(cm.accuracy()) << "\n";
    }

    double mean = 0.0;
    for (double a : accuracies)
        mean += a;
    mean /= static_cast<double>(accuracies.size());
    double var = 0.0;
    for (double a : accuracies)
        var += (a - mean) * (a - mean);
    const double stddev =
        accuracies.size() > 1 ? std::sqrt(var / static_cast<double>(accuracies.size() - 1)) : 0.0;

    std::size_t majority = 0;
    for (const auto& label : manifest.distinct_labels()) {
        std::size_t count = 0;
        for (const auto& l : file.labels)
            count += l == label ? 1 : 0;
        majority = std::max(majority, count);
    }

    write_confusion(aggregate, args.output);
    std::cout << "mean_accuracy=" << catex::io::format_double(mean) << "\n";
    std::cout << "std_accuracy=" << catex::io::format_double(stddev) << "\n";
    std::cout << "majority_baseline="
              << catex::io::format_double(static_cast<double>(majority) / static_cast<double>(n))
              << "\n";
    std::cout << "confusion_written=" << args.output << "\n";
    return kExitOk;
}

struct SynthArgs {
    std::string out_dir;
    int classes = 4;
    int per_class = 20;
    int size = 64;
    std::uint64_t seed = 0;
    double noise = 0.05;
};

int run_synth(const SynthArgs& args) {
    const int min_size = 2 * catex::CatexConfig().max_pad() + 1;
    if (args.size < min_size)
        std::fprintf(stderr,
                     "warning: size %d is below %d; extraction with the default schedule "
                     "will fail on these images\n",
                     args.size, min_size);
    catex::dataset::generate_synthetic(args.classes, args.per_class, args.size, args.seed,
                                       args.out_dir, args.noise);
    std::cout << "manifest=" << (std::filesystem::path(args.out_dir) / "manifest.tsv").string()
              << " images=" << args.classes * args.per_class << "\n";
    return kExitOk;
}

struct VerifyArgs {
    int max_value = 10;
    int length = 3;
};

int run_verify(const VerifyArgs& args) {
    using catex::formal::VerificationReport;
    const VerificationReport reports[] = {
        catex::formal::verify_lemma1(args.max_value, args.length),
        catex::formal::verify_lemma2(args.max_value, args.length),
        catex::formal::verify_monotone_case(args.max_value, args.length),
    };
    bool ok = true;
    for (const auto& r : reports) {
        std::cout << r.check << ": violations=" << r.violations << " triggered=" << r.triggered
                  << " sequences=" << r.total_sequences << " (values 0.." << r.max_value
                  << ", length " << r.length << ")\n";
        ok = ok && r.passed();
    }
    std::cout << (ok ? "all checks passed" : "CHECK FAILED") << "\n";
    return ok ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CATex texture descriptors: extraction, evaluation, and analysis"};
    app.require_subcommand(1);

    ExtractArgs extract_args;
    auto* extract = app.add_subcommand("extract", "Compute descriptors for a manifest of images");
    extract->add_option("manifest", extract_args.manifest_path, "Manifest file (path<TAB>label[<TAB>tag])")
        ->required();
    extract->add_option("--output", extract_args.output, "Feature file to write")->required();
    extract->add_option("--alpha", extract_args.alpha, "Transition mix weight in [0,1]");
    extract->add_option("--iterations", extract_args.iterations, "CA time steps");
    extract->add_option("--schedule", extract_args.schedule, "Comma-separated p:r pairs");
    extract->add_option("--jobs", extract_args.jobs, "Parallel workers (default $CATEX_JOBS or cores)");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Train/test a classifier over a feature file");
    evaluate->add_option("features", eval_args.features_path, "Feature file from extract")->required();
    evaluate->add_option("--protocol", eval_args.protocol, "random-half or sample-holdout");
    evaluate->add_option("--rounds", eval_args.rounds, "Split rounds");
    evaluate->add_option("--folds", eval_args.folds, "Nested CV folds for PCA dimension selection");
    evaluate->add_option("--seed", eval_args.seed, "Split and fold seed");
    evaluate->add_option("--classifier", eval_args.classifier, "lda (PCA+LDA) or knn (raw 1-NN)");
    evaluate
        ->add_option("--pca-grid", eval_args.pca_grid,
                     "Candidate PCA dimensions (default grid is capped by feasibility)")
        ->delimiter(',');
    evaluate->add_option("--output", eval_args.output, "Confusion matrix CSV path");
    evaluate->add_flag("--self-test", eval_args.self_test,
                       "Diagnostic: single round with train = test = all rows");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic texture dataset");
    synth->add_option("out_dir", synth_args.out_dir, "Output directory")->required();
    synth->add_option("--classes", synth_args.classes, "Number of classes");
    synth->add_option("--per-class", synth_args.per_class, "Images per class");
    synth->add_option("--size", synth_args.size, "Image side length in pixels");
    synth->add_option("--seed", synth_args.seed, "Noise seed");
    synth->add_option("--noise", synth_args.noise, "Additive noise amplitude");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify-lemmas",
                                      "Exhaustively check the 1-D operator lemmas");
    verify->add_option("--max-value", verify_args.max_value, "Largest sequence value");
    verify->add_option("--length", verify_args.length, "Sequence length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (extract->parsed())
            return run_extract(extract_args);
        if (evaluate->parsed()) {
            eval_args.grid_is_default = evaluate->get_option("--pca-grid")->count() == 0;
            return run_evaluate(eval_args);
        }
        if (synth->parsed())
            return run_synth(synth_args);
        if (verify->parsed())
            return run_verify(verify_args);
    } catch (const catex::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const catex::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const catex::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitUsage;
}
