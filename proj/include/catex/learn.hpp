#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catex/errors.hpp"
#include "catex/random.hpp"

namespace catex::learn {

/// Fitted PCA projection. Components are stored as columns of an orthonormal
/// d x k matrix; explained variances are the matching covariance eigenvalues,
/// non-increasing.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;
    Eigen::VectorXd explained_variance;
    bool degenerate = false; // all-identical input: zero-variance space

    int input_dimension() const { return static_cast<int>(mean.size()); }
    int output_dimension() const { return static_cast<int>(components.cols()); }
};

/// Top-k principal components of the sample covariance, computed from the
/// singular value decomposition of the centered data matrix. The sign of
/// each component is fixed so its largest-magnitude entry is positive.
inline PcaModel pca_fit(const Eigen::MatrixXd& samples, int k) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index d = samples.cols();
    if (n < 2)
        throw ValidationError("pca_fit: need at least 2 samples");
    if (k < 1 || k > std::min<Eigen::Index>(n - 1, d))
        throw ValidationError("pca_fit: k out of range");

    PcaModel model;
    model.mean = samples.colwise().mean();
    Eigen::MatrixXd centered = samples.rowwise() - model.mean.transpose();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();

    model.components = svd.matrixV().leftCols(k);
    model.explained_variance.resize(k);
    for (int i = 0; i < k; ++i)
        model.explained_variance(i) = sigma(i) * sigma(i) / static_cast<double>(n - 1);
    model.degenerate = sigma.size() == 0 || sigma(0) <= 0.0;

    for (int c = 0; c < k; ++c) {
        Eigen::Index at = 0;
        model.components.col(c).cwiseAbs().maxCoeff(&at);
        if (model.components(at, c) < 0.0)
            model.components.col(c) = -model.components.col(c);
    }
    return model;
}

/// Projects a sample onto the component basis after mean-centering.
inline Eigen::VectorXd pca_transform(const PcaModel& model, const Eigen::VectorXd& sample) {
    if (sample.size() != model.mean.size())
        throw ValidationError("pca_transform: sample dimension mismatch");
    return model.components.transpose() * (sample - model.mean);
}

/// Row-wise convenience projection.
inline Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& samples) {
    if (samples.cols() != model.mean.size())
        throw ValidationError("pca_transform: sample dimension mismatch");
    return (samples.rowwise() - model.mean.transpose()) * model.components;
}

/// Gaussian equal-covariance Bayes classifier. The pooled within-class
/// covariance is shrunk toward a scaled identity before inversion.
struct LdaModel {
    Eigen::MatrixXd class_means;               // one row per class
    Eigen::MatrixXd pooled_covariance_inverse; // d x d symmetric
    Eigen::VectorXd priors;                    // class frequencies, sum 1
    std::vector<std::string> labels;           // sorted class identifiers

    int dimension() const { return static_cast<int>(class_means.cols()); }
    int classes() const { return static_cast<int>(labels.size()); }
};

namespace learn_detail {

inline std::vector<std::string> sorted_unique_labels(const std::vector<std::string>& labels) {
    std::set<std::string> unique(labels.begin(), labels.end());
    return std::vector<std::string>(unique.begin(), unique.end());
}

inline std::vector<int> label_indices(const std::vector<std::string>& labels,
                                      const std::vector<std::string>& classes) {
    std::map<std::string, int> lookup;
    for (std::size_t i = 0; i < classes.size(); ++i)
        lookup[classes[i]] = static_cast<int>(i);
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[i] = lookup.at(labels[i]);
    return out;
}

} // namespace learn_detail

inline LdaModel lda_fit(const Eigen::MatrixXd& samples, const std::vector<std::string>& labels,
                        double shrinkage = 1e-4) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index d = samples.cols();
    if (static_cast<std::size_t>(n) != labels.size())
        throw ValidationError("lda_fit: sample and label counts differ");

    LdaModel model;
    model.labels = learn_detail::sorted_unique_labels(labels);
    const int K = model.classes();
    if (K < 2)
        throw ValidationError("lda_fit: need at least 2 classes");
    const std::vector<int> idx = learn_detail::label_indices(labels, model.labels);

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
    model.class_means = Eigen::MatrixXd::Zero(K, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        counts(idx[i]) += 1.0;
        model.class_means.row(idx[i]) += samples.row(i);
    }
    for (int c = 0; c < K; ++c) {
        if (counts(c) < 2.0)
            throw ValidationError("lda_fit: class '" + model.labels[c] + "' has fewer than 2 samples");
        model.class_means.row(c) /= counts(c);
    }
    model.priors = counts / static_cast<double>(n);

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd dev = samples.row(i) - model.class_means.row(idx[i]);
        pooled.noalias() += dev.transpose() * dev;
    }
    pooled /= static_cast<double>(n - K);

    // Shrink toward the identity scaled by the mean variance; keeps the
    // matrix invertible when the PCA dimension approaches the sample count.
    const double trace = pooled.trace();
    const double scale = trace > 0.0 ? trace / static_cast<double>(d) : 1.0;
    Eigen::MatrixXd regularized = (1.0 - shrinkage) * pooled;
    regularized.diagonal().array() += shrinkage * scale;

    model.pooled_covariance_inverse =
        regularized.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
    return model;
}

/// Linear discriminant score of one class for one sample.
inline double lda_score(const LdaModel& model, int class_index, const Eigen::VectorXd& sample) {
    const Eigen::VectorXd mean = model.class_means.row(class_index).transpose();
    const Eigen::VectorXd w = model.pooled_covariance_inverse * mean;
    return w.dot(sample) - 0.5 * w.dot(mean) + std::log(model.priors(class_index));
}

inline int lda_predict_index(const LdaModel& model, const Eigen::VectorXd& sample) {
    if (sample.size() != model.dimension())
        throw ValidationError("lda_predict: sample dimension mismatch");
    int best = 0;
    double best_score = lda_score(model, 0, sample);
    for (int c = 1; c < model.classes(); ++c) {
        const double score = lda_score(model, c, sample);
        if (score > best_score) { // ties keep the earlier label
            best_score = score;
            best = c;
        }
    }
    return best;
}

inline const std::string& lda_predict(const LdaModel& model, const Eigen::VectorXd& sample) {
    return model.labels[lda_predict_index(model, sample)];
}

/// Label of the Euclidean-nearest training sample; ties keep the first index.
inline std::string knn_predict(const Eigen::MatrixXd& train_samples,
                               const std::vector<std::string>& train_labels,
                               const Eigen::VectorXd& sample) {
    if (train_samples.rows() == 0)
        throw ValidationError("knn_predict: empty training set");
    if (static_cast<std::size_t>(train_samples.rows()) != train_labels.size())
        throw ValidationError("knn_predict: sample and label counts differ");
    if (sample.size() != train_samples.cols())
        throw ValidationError("knn_predict: sample dimension mismatch");

    Eigen::Index best = 0;
    double best_dist = (train_samples.row(0).transpose() - sample).squaredNorm();
    for (Eigen::Index i = 1; i < train_samples.rows(); ++i) {
        const double dist = (train_samples.row(i).transpose() - sample).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return train_labels[static_cast<std::size_t>(best)];
}

/// Stratified fold assignment: per class, a seeded shuffle deals samples
/// round-robin over the folds. Returns fold index per sample.
inline std::vector<int> stratified_folds(const std::vector<std::string>& labels, int folds,
                                         std::uint64_t seed) {
    if (folds < 2)
        throw ValidationError("stratified_folds: need at least 2 folds");
    const auto classes = learn_detail::sorted_unique_labels(labels);
    std::vector<int> fold_of(labels.size(), -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == classes[c])
                members.push_back(i);
        SplitMix64 rng(mix_seed(seed, c));
        deterministic_shuffle(members, rng);
        for (std::size_t j = 0; j < members.size(); ++j)
            fold_of[members[j]] = static_cast<int>(j % folds);
    }
    return fold_of;
}

/// Picks the PCA dimension by nested cross-validation of a PCA+LDA pipeline
/// over the training samples only. Infeasible candidates are skipped; ties
/// resolve to the smaller k.
inline int select_components(const Eigen::MatrixXd& samples,
                             const std::vector<std::string>& labels,
                             const std::vector<int>& candidate_ks, int folds,
                             std::uint64_t seed) {
    if (candidate_ks.empty())
        throw ValidationError("select_components: no candidates");
    const std::vector<int> fold_of = stratified_folds(labels, folds, seed);

    std::vector<int> candidates(candidate_ks);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    int best_k = -1;
    double best_accuracy = -1.0;
    for (int k : candidates) {
        double correct = 0.0, total = 0.0;
        bool feasible = true;
        for (int f = 0; f < folds && feasible; ++f) {
            std::vector<Eigen::Index> train_rows, val_rows;
            for (Eigen::Index i = 0; i < samples.rows(); ++i)
                (fold_of[i] == f ? val_rows : train_rows).push_back(i);
            if (val_rows.empty() ||
                k > std::min<Eigen::Index>(static_cast<Eigen::Index>(train_rows.size()) - 1,
                                           samples.cols())) {
                feasible = false;
                break;
            }
            Eigen::MatrixXd train(train_rows.size(), samples.cols());
            std::vector<std::string> train_labels(train_rows.size());
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                train.row(i) = samples.row(train_rows[i]);
                train_labels[i] = labels[train_rows[i]];
            }
            const PcaModel pca = pca_fit(train, k);
            const LdaModel lda = lda_fit(pca_transform(pca, train), train_labels);
            for (Eigen::Index row : val_rows) {
                const Eigen::VectorXd projected =
                    pca_transform(pca, Eigen::VectorXd(samples.row(row).transpose()));
                correct += lda_predict(lda, projected) == labels[row] ? 1.0 : 0.0;
                total += 1.0;
            }
        }
        if (!feasible) continue;
        const double accuracy = correct / total;
        if (accuracy > best_accuracy) { // ties keep the smaller k
            best_accuracy = accuracy;
            best_k = k;
        }
    }
    if (best_k < 0)
        throw ValidationError("select_components: no feasible candidate");
    return best_k;
}

/// Counts of (true class, predicted class) pairs over a labeled evaluation.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint64_t>> counts; // [true][predicted]

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& row : counts)
            for (std::uint64_t v : row)
                t += v;
        return t;
    }

    double accuracy() const {
        std::uint64_t trace = 0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            trace += counts[i][i];
        const std::uint64_t t = total();
        return t == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(t);
    }
};

inline ConfusionMatrix evaluate(const std::vector<std::string>& predictions,
                                const std::vector<std::string>& truths) {
    if (predictions.size() != truths.size())
        throw ValidationError("evaluate: prediction and truth counts differ");

    std::set<std::string> all(truths.begin(), truths.end());
    all.insert(predictions.begin(), predictions.end());

    ConfusionMatrix cm;
    cm.labels.assign(all.begin(), all.end());
    cm.counts.assign(cm.labels.size(), std::vector<std::uint64_t>(cm.labels.size(), 0));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < cm.labels.size(); ++i)
        index[cm.labels[i]] = i;
    for (std::size_t i = 0; i < truths.size(); ++i)
        ++cm.counts[index.at(truths[i])][index.at(predictions[i])];
    return cm;
}

/// Merges confusion matrices from several evaluation rounds.
inline ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    if (a.labels.empty()) return b;
    if (b.labels.empty()) return a;

    std::set<std::string> all(a.labels.begin(), a.labels.end());
    all.insert(b.labels.begin(), b.labels.end());
    ConfusionMatrix out;
    out.labels.assign(all.begin(), all.end());
    out.counts.assign(out.labels.size(), std::vector<std::uint64_t>(out.labels.size(), 0));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < out.labels.size(); ++i)
        index[out.labels[i]] = i;
    for (const ConfusionMatrix* part : {&a, &b})
        for (std::size_t i = 0; i < part->labels.size(); ++i)
            for (std::size_t j = 0; j < part->labels.size(); ++j)
                out.counts[index.at(part->labels[i])][index.at(part->labels[j])] +=
                    part->counts[i][j];
    return out;
}

} // namespace catex::learn
