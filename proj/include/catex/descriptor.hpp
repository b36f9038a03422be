#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "catex/errors.hpp"
#include "catex/image.hpp"
#include "catex/lbp.hpp"

namespace catex {

/// Hyperparameters of the descriptor: the chaos-control weight alpha, the
/// number of CA time steps, and the ordered list of (P, R) neighborhoods.
struct CatexConfig {
    double alpha = 0.10;
    int iterations = 20;
    std::vector<LbpConfig> schedule = default_schedule();

    /// The nine standard configurations: (8,1), (16,2), then (24,R) for R=3..9.
    static std::vector<LbpConfig> default_schedule() {
        std::vector<LbpConfig> s;
        s.emplace_back(8, 1.0);
        s.emplace_back(16, 2.0);
        for (int r = 3; r <= 9; ++r)
            s.emplace_back(24, static_cast<double>(r));
        return s;
    }

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw ValidationError("CatexConfig: alpha must lie in [0,1]");
        if (iterations < 0)
            throw ValidationError("CatexConfig: iterations must be non-negative");
        if (schedule.empty())
            throw ValidationError("CatexConfig: schedule must be nonempty");
    }

    int max_pad() const {
        int m = 0;
        for (const auto& c : schedule)
            m = std::max(m, c.pad());
        return m;
    }
};

/// Describes where each descriptor position comes from: histogram blocks are
/// laid out iteration-major, then in schedule order, then by bin index.
class DescriptorLayout {
public:
    struct Position {
        int iteration;
        int schedule_index;
        int bin;
    };

    DescriptorLayout() = default;

    DescriptorLayout(int iterations, const std::vector<LbpConfig>& schedule)
        : iterations_(iterations) {
        bins_.reserve(schedule.size());
        for (const auto& c : schedule)
            bins_.push_back(c.code_count());
        offsets_.resize(bins_.size() + 1, 0);
        for (std::size_t i = 0; i < bins_.size(); ++i)
            offsets_[i + 1] = offsets_[i] + bins_[i];
    }

    int iterations() const { return iterations_; }
    int blocks() const { return iterations_ + 1; }
    std::size_t block_size() const { return offsets_.back(); }
    std::size_t total() const { return static_cast<std::size_t>(blocks()) * block_size(); }

    /// Start of the histogram for (iteration, schedule entry).
    std::size_t offset(int iteration, int schedule_index) const {
        return static_cast<std::size_t>(iteration) * block_size() + offsets_[schedule_index];
    }

    Position locate(std::size_t flat_index) const {
        Position pos;
        pos.iteration = static_cast<int>(flat_index / block_size());
        std::size_t rem = flat_index % block_size();
        int entry = 0;
        while (rem >= offsets_[entry + 1])
            ++entry;
        pos.schedule_index = entry;
        pos.bin = static_cast<int>(rem - offsets_[entry]);
        return pos;
    }

private:
    int iterations_ = 0;
    std::vector<int> bins_;
    std::vector<std::size_t> offsets_ = {0};
};

/// The concatenated histogram feature vector plus its layout metadata.
struct DescriptorVector {
    std::vector<double> values;
    DescriptorLayout layout;
};

/// One CA update: the convex mix (1-alpha)*state + alpha*lbp_normalized,
/// applied per pixel. Results are clamped against sub-ulp overshoot so the
/// output stays a valid state grid.
inline GrayImage transition(const GrayImage& state, const GrayImage& lbp_normalized,
                            double alpha) {
    if (state.width() != lbp_normalized.width() || state.height() != lbp_normalized.height())
        throw ValidationError("transition: state and LBP grids differ in size");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("transition: alpha must lie in [0,1]");

    const double keep = 1.0 - alpha;
    std::vector<double> out(state.size());
    const auto& s = state.data();
    const auto& l = lbp_normalized.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(keep * s[i] + alpha * l[i], 0.0, 1.0);
    return GrayImage(state.width(), state.height(), std::move(out));
}

/// Observer for the evolving CA states: called as (time, schedule_index,
/// state) after every stack update. Time 1 is the first mix of the input
/// image with its LBP map.
using StateObserver = std::function<void(int, int, const GrayImage&)>;

/// Runs the full descriptor extraction. Per schedule entry the input image
/// is padded, its riu2 map histogrammed (the plain LBP block), and a state
/// stack initialized as (1-alpha)*I + alpha*normalized-map. Each subsequent
/// time step histograms the map of the current stack and then mixes the map
/// back into the stack. Block k holds the histograms of the states at time k.
inline DescriptorVector extract(const GrayImage& image, const CatexConfig& config,
                                const StateObserver& observer = {}) {
    config.validate();
    const int needed = 2 * config.max_pad() + 1;
    if (image.width() < needed || image.height() < needed)
        throw ValidationError("extract: image smaller than 2*ceil(max r)+1");

    const std::size_t entries = config.schedule.size();
    DescriptorVector result;
    result.layout = DescriptorLayout(config.iterations, config.schedule);
    result.values.reserve(result.layout.total());

    auto append_histogram = [&](const LbpMap& map) {
        const Histogram h = histogram(map);
        result.values.insert(result.values.end(), h.bins.begin(), h.bins.end());
    };

    // Iteration 0: riu2 histograms of the original image.
    std::vector<LbpMap> maps;
    maps.reserve(entries);
    for (const auto& entry : config.schedule) {
        maps.push_back(lbp_map(pad_symmetric(image, entry.pad()), entry));
        append_histogram(maps.back());
    }

    // First CA step mixes the original image with each normalized map.
    std::vector<GrayImage> stacks;
    stacks.reserve(entries);
    for (std::size_t e = 0; e < entries; ++e) {
        stacks.push_back(transition(image, normalize_map(maps[e]), config.alpha));
        if (observer) observer(1, static_cast<int>(e), stacks[e]);
    }

    for (int k = 1; k <= config.iterations; ++k) {
        for (std::size_t e = 0; e < entries; ++e) {
            const auto& entry = config.schedule[e];
            maps[e] = lbp_map(pad_symmetric(stacks[e], entry.pad()), entry);
            append_histogram(maps[e]);
        }
        for (std::size_t e = 0; e < entries; ++e) {
            stacks[e] = transition(stacks[e], normalize_map(maps[e]), config.alpha);
            if (observer) observer(k + 1, static_cast<int>(e), stacks[e]);
        }
    }
    return result;
}

} // namespace catex
