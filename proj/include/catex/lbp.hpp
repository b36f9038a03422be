#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "catex/errors.hpp"
#include "catex/image.hpp"

namespace catex {

/// A circular sampling neighborhood: p points on a circle of radius r.
struct LbpConfig {
    LbpConfig(int p_, double r_) : p(p_), r(r_) {
        if (p < 4)
            throw ValidationError("LbpConfig: need at least 4 neighbors");
        if (!(r >= 1.0))
            throw ValidationError("LbpConfig: radius must be at least 1");
    }

    int p;
    double r;

    /// Valid riu2 codes are 0..p+1, so histograms carry p+2 bins.
    int code_count() const { return p + 2; }
    int pad() const { return static_cast<int>(std::ceil(r)); }
};

/// Per-pixel riu2 codes, same indexing convention as GrayImage.
class LbpMap {
public:
    LbpMap(int width, int height, std::vector<int> codes, LbpConfig config)
        : width_(width), height_(height), codes_(std::move(codes)), config_(config) {
        if (width < 1 || height < 1)
            throw ValidationError("LbpMap: dimensions must be at least 1x1");
        if (codes_.size() != static_cast<std::size_t>(width) * height)
            throw ValidationError("LbpMap: code count does not match dimensions");
        for (int c : codes_)
            if (c < 0 || c > config_.p + 1)
                throw ValidationError("LbpMap: code outside [0, p+1]");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    const LbpConfig& config() const { return config_; }
    int operator()(int x, int y) const {
        return codes_[static_cast<std::size_t>(y) * width_ + x];
    }
    const std::vector<int>& codes() const { return codes_; }

    bool operator==(const LbpMap& other) const {
        return width_ == other.width_ && height_ == other.height_ && codes_ == other.codes_;
    }

private:
    int width_;
    int height_;
    std::vector<int> codes_;
    LbpConfig config_;
};

/// Normalized code frequencies, bins indexed 0..p+1.
struct Histogram {
    std::vector<double> bins;
};

namespace lbp_detail {

inline constexpr double kLatticeSnapTolerance = 1e-6;

inline double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) <= kLatticeSnapTolerance ? r : v;
}

/// Sampling offsets in (column, row) coordinates: neighbor k sits at angle
/// 2*pi*k/p counter-clockwise from east, i.e. at (r cos t, -r sin t). When
/// 4 divides p the offsets are generated from first-quadrant cos/sin values
/// and reflected, so the pattern is exactly closed under 90-degree rotations.
/// Coordinates within 1e-6 of the integer lattice snap onto it.
inline std::vector<std::pair<double, double>> neighbor_offsets(const LbpConfig& config) {
    const int p = config.p;
    const double r = config.r;
    std::vector<std::pair<double, double>> offsets(p);
    if (p % 4 == 0) {
        const int quarter = p / 4;
        for (int k = 0; k < quarter; ++k) {
            const double theta = 2.0 * std::numbers::pi * k / p;
            const double c = snap(r * std::cos(theta));
            const double s = snap(r * std::sin(theta));
            offsets[k] = {c, -s};
            offsets[k + quarter] = {-s, -c};
            offsets[k + 2 * quarter] = {-c, s};
            offsets[k + 3 * quarter] = {s, c};
        }
    } else {
        for (int k = 0; k < p; ++k) {
            const double theta = 2.0 * std::numbers::pi * k / p;
            offsets[k] = {snap(r * std::cos(theta)), snap(-r * std::sin(theta))};
        }
    }
    return offsets;
}

/// One neighbor's precomputed interpolation cell, relative to the center
/// pixel. Lerp against the cell base keeps constant regions exact and never
/// touches pixels with zero weight.
struct NeighborCell {
    int ix, iy;     // cell base offset: floor of the sampling offset
    double fx, fy;  // in [0,1)
};

inline NeighborCell make_cell(double dx, double dy) {
    NeighborCell cell;
    const double bx = std::floor(dx);
    const double by = std::floor(dy);
    cell.ix = static_cast<int>(bx);
    cell.iy = static_cast<int>(by);
    cell.fx = dx - bx;
    cell.fy = dy - by;
    return cell;
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

inline double sample_cell(const GrayImage& img, int cx, int cy, const NeighborCell& cell) {
    const int x0 = cx + cell.ix;
    const int y0 = cy + cell.iy;
    if (cell.fx == 0.0 && cell.fy == 0.0) return img(x0, y0);
    if (cell.fy == 0.0) return lerp(img(x0, y0), img(x0 + 1, y0), cell.fx);
    if (cell.fx == 0.0) return lerp(img(x0, y0), img(x0, y0 + 1), cell.fy);
    const double top = lerp(img(x0, y0), img(x0 + 1, y0), cell.fx);
    const double bottom = lerp(img(x0, y0 + 1), img(x0 + 1, y0 + 1), cell.fx);
    return lerp(top, bottom, cell.fy);
}

inline std::vector<NeighborCell> make_cells(const LbpConfig& config) {
    std::vector<NeighborCell> cells;
    cells.reserve(config.p);
    for (const auto& [dx, dy] : neighbor_offsets(config))
        cells.push_back(make_cell(dx, dy));
    return cells;
}

} // namespace lbp_detail

/// Samples the p circular neighbors of (x, y) with bilinear interpolation.
/// The circle must lie fully inside the image.
inline std::vector<double> sample_neighbors(const GrayImage& image, int x, int y,
                                            const LbpConfig& config) {
    const int pad = config.pad();
    if (x - pad < 0 || y - pad < 0 || x + pad >= image.width() || y + pad >= image.height())
        throw ValidationError("sample_neighbors: neighbor circle exits image bounds");
    std::vector<double> samples(config.p);
    const auto cells = lbp_detail::make_cells(config);
    for (int k = 0; k < config.p; ++k)
        samples[k] = lbp_detail::sample_cell(image, x, y, cells[k]);
    return samples;
}

/// Number of 0/1 transitions around the circular bit sequence.
inline int uniformity(std::span<const int> bits) {
    if (bits.empty()) return 0;
    int u = std::abs(bits.back() - bits.front());
    for (std::size_t i = 1; i < bits.size(); ++i)
        u += std::abs(bits[i] - bits[i - 1]);
    return u;
}

/// Rotation-invariant uniform code: the count of neighbors strictly brighter
/// than the center when the bit pattern has at most two transitions, p+1
/// otherwise. The sign test is strict: ties contribute a 0 bit.
inline int riu2_code(double center, std::span<const double> neighbors) {
    const int p = static_cast<int>(neighbors.size());
    int ones = 0;
    int transitions = 0;
    int first = 0, prev = 0;
    for (int k = 0; k < p; ++k) {
        const int bit = neighbors[k] > center ? 1 : 0;
        ones += bit;
        if (k == 0)
            first = bit;
        else
            transitions += bit != prev;
        prev = bit;
    }
    transitions += first != prev;
    return transitions <= 2 ? ones : p + 1;
}

/// Computes the riu2 code of every interior pixel of an already padded
/// image; the output shrinks by ceil(r) on each side, restoring the
/// pre-padding dimensions when the caller padded by exactly ceil(r).
inline LbpMap lbp_map(const GrayImage& image, const LbpConfig& config) {
    const int pad = config.pad();
    const int ow = image.width() - 2 * pad;
    const int oh = image.height() - 2 * pad;
    if (ow < 1 || oh < 1)
        throw ValidationError("lbp_map: image smaller than 2*ceil(r)+1");

    const auto cells = lbp_detail::make_cells(config);
    const int p = config.p;
    std::vector<int> codes(static_cast<std::size_t>(ow) * oh);

    std::size_t out = 0;
    for (int y = pad; y < pad + oh; ++y) {
        for (int x = pad; x < pad + ow; ++x) {
            const double center = image(x, y);
            int ones = 0, transitions = 0, first = 0, prev = 0;
            for (int k = 0; k < p; ++k) {
                const int bit = lbp_detail::sample_cell(image, x, y, cells[k]) > center ? 1 : 0;
                ones += bit;
                if (k == 0)
                    first = bit;
                else
                    transitions += bit != prev;
                prev = bit;
            }
            transitions += first != prev;
            codes[out++] = transitions <= 2 ? ones : p + 1;
        }
    }
    return LbpMap(ow, oh, std::move(codes), config);
}

/// Frequency of each code value over the map; exactly p+2 bins.
inline Histogram histogram(const LbpMap& map) {
    Histogram h;
    h.bins.assign(map.config().code_count(), 0.0);
    for (int c : map.codes())
        h.bins[c] += 1.0;
    const double total = static_cast<double>(map.codes().size());
    for (double& b : h.bins)
        b /= total;
    return h;
}

/// Maps codes onto [0,1] by dividing by p+1, for feeding back into the CA.
inline GrayImage normalize_map(const LbpMap& map) {
    std::vector<double> values(map.codes().size());
    const double scale = 1.0 / (map.config().p + 1);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = map.codes()[i] * scale;
    return GrayImage(map.width(), map.height(), std::move(values));
}

} // namespace catex
