#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "catex/errors.hpp"

namespace catex {

/// A 2-D grid of intensities in [0,1], row-major. Pixels are addressed as
/// (x, y) = (column, row). Also serves as the cellular-automaton state grid.
class GrayImage {
public:
    GrayImage(int width, int height)
        : width_(width), height_(height) {
        check_dims(width, height);
        data_.assign(static_cast<std::size_t>(width) * height, 0.0);
    }

    GrayImage(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != static_cast<std::size_t>(width) * height)
            throw ValidationError("GrayImage: data length does not match width*height");
        for (double v : data_)
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("GrayImage: value outside [0,1]");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double operator()(int x, int y) const { return data_[idx(x, y)]; }
    double& operator()(int x, int y) { return data_[idx(x, y)]; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const GrayImage& other) const {
        return width_ == other.width_ && height_ == other.height_ && data_ == other.data_;
    }

private:
    static void check_dims(int width, int height) {
        if (width < 1 || height < 1)
            throw ValidationError("GrayImage: dimensions must be at least 1x1");
    }

    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<double> data_;
};

/// Mirror-extends an image by r pixels on every side. Boundary-inclusive
/// reflection: pad row -1 copies row 0, pad row -2 copies row 1, and so on
/// (the same rule along columns). Requires 1 <= r <= min(width, height).
inline GrayImage pad_symmetric(const GrayImage& image, int r) {
    if (r < 1)
        throw ValidationError("pad_symmetric: pad must be at least 1");
    if (r > image.width() || r > image.height())
        throw ValidationError("pad_symmetric: pad exceeds an image dimension");

    const int w = image.width();
    const int h = image.height();
    auto reflect = [](int i, int n) {
        if (i < 0) return -1 - i;
        if (i >= n) return 2 * n - 1 - i;
        return i;
    };

    GrayImage out(w + 2 * r, h + 2 * r);
    for (int y = -r; y < h + r; ++y) {
        const int sy = reflect(y, h);
        for (int x = -r; x < w + r; ++x)
            out(x + r, y + r) = image(reflect(x, w), sy);
    }
    return out;
}

} // namespace catex
