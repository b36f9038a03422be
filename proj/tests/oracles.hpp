// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written from the definitions, without
// reusing the optimized code paths: direct per-pixel riu2 evaluation, a
// cyclic Jacobi eigensolver, Gauss-Jordan inversion, Gaussian log-density
// scoring, and a linear-scan nearest neighbor.
#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "catex/image.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// riu2 map, evaluated naively pixel by pixel.
//
// Sampling convention (matches the one documented in the library): neighbor
// k of P sits at angle 2*pi*k/P counter-clockwise from east, at offset
// (r cos t, -r sin t) in (column, row) coordinates; when 4 divides P the
// offsets come from first-quadrant cos/sin values reflected across
// quadrants; coordinates within 1e-6 of the lattice snap to it; bilinear
// interpolation is the two-stage lerp a + t*(b - a).
// ---------------------------------------------------------------------------

inline double snap_coordinate(double v) {
    const double rounded = std::round(v);
    if (std::abs(v - rounded) <= 1e-6) return rounded;
    return v;
}

inline void neighbor_offset(int k, int p, double r, double& dx, double& dy) {
    double ux, uy; // mathematical coordinates, y up
    if (p % 4 == 0) {
        const int quarter = p / 4;
        const int q = k / quarter;
        const double theta = 2.0 * std::numbers::pi * (k % quarter) / p;
        const double c = snap_coordinate(r * std::cos(theta));
        const double s = snap_coordinate(r * std::sin(theta));
        switch (q) {
        case 0: ux = c; uy = s; break;
        case 1: ux = -s; uy = c; break;
        case 2: ux = -c; uy = -s; break;
        default: ux = s; uy = -c; break;
        }
    } else {
        const double theta = 2.0 * std::numbers::pi * k / p;
        ux = snap_coordinate(r * std::cos(theta));
        uy = snap_coordinate(r * std::sin(theta));
    }
    dx = ux;
    dy = -uy;
}

inline double sample_bilinear(const catex::GrayImage& img, int cx, int cy, double dx, double dy) {
    const double bx = std::floor(dx);
    const double by = std::floor(dy);
    const int x0 = cx + static_cast<int>(bx);
    const int y0 = cy + static_cast<int>(by);
    const double fx = dx - bx;
    const double fy = dy - by;
    if (fx == 0.0 && fy == 0.0) return img(x0, y0);
    if (fy == 0.0) return img(x0, y0) + fx * (img(x0 + 1, y0) - img(x0, y0));
    if (fx == 0.0) return img(x0, y0) + fy * (img(x0, y0 + 1) - img(x0, y0));
    const double top = img(x0, y0) + fx * (img(x0 + 1, y0) - img(x0, y0));
    const double bottom = img(x0, y0 + 1) + fx * (img(x0 + 1, y0 + 1) - img(x0, y0 + 1));
    return top + fy * (bottom - top);
}

inline int riu2_at(const catex::GrayImage& img, int cx, int cy, int p, double r) {
    const double center = img(cx, cy);
    std::vector<int> bits(p);
    for (int k = 0; k < p; ++k) {
        double dx, dy;
        neighbor_offset(k, p, r, dx, dy);
        bits[k] = sample_bilinear(img, cx, cy, dx, dy) > center ? 1 : 0;
    }
    int u = std::abs(bits[p - 1] - bits[0]);
    for (int k = 1; k < p; ++k)
        u += std::abs(bits[k] - bits[k - 1]);
    if (u > 2) return p + 1;
    int ones = 0;
    for (int b : bits)
        ones += b;
    return ones;
}

/// Direct evaluation of the riu2 map of an already padded image.
inline std::vector<int> riu2_map(const catex::GrayImage& padded, int p, double r) {
    const int pad = static_cast<int>(std::ceil(r));
    const int ow = padded.width() - 2 * pad;
    const int oh = padded.height() - 2 * pad;
    std::vector<int> codes;
    codes.reserve(static_cast<std::size_t>(ow) * oh);
    for (int y = pad; y < pad + oh; ++y)
        for (int x = pad; x < pad + ow; ++x)
            codes.push_back(riu2_at(padded, x, y, p, r));
    return codes;
}

// ---------------------------------------------------------------------------
// Dense symmetric eigenvalues via cyclic Jacobi rotations.
// ---------------------------------------------------------------------------

inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (std::size_t pp = 0; pp < n; ++pp) {
            for (std::size_t q = pp + 1; q < n; ++q) {
                if (std::abs(a[pp][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[pp][pp]) / (2.0 * a[pp][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][pp], akq = a[k][q];
                    a[k][pp] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[pp][k], aqk = a[q][k];
                    a[pp][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i)
        eig[i] = a[i][i];
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

/// Sample covariance of row vectors, divided by n-1, formed explicitly.
inline std::vector<std::vector<double>> covariance(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t d = rows[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j)
            mean[j] += r[j];
    for (double& m : mean)
        m /= static_cast<double>(n);
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    for (auto& row : cov)
        for (double& v : row)
            v /= static_cast<double>(n - 1);
    return cov;
}

// ---------------------------------------------------------------------------
// Gaussian equal-covariance classification by direct log-density evaluation.
// ---------------------------------------------------------------------------

inline std::vector<std::vector<double>> gauss_jordan_inverse(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("oracle: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double scale = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= scale;
            inv[col][j] /= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// Predicts by maximizing log N(x; mu_c, sigma) + log prior_c, with the
/// pooled covariance and shrinkage recomputed here from the definitions.
inline std::size_t gaussian_predict(const std::vector<std::vector<double>>& samples,
                                    const std::vector<std::size_t>& class_of,
                                    std::size_t classes, const std::vector<double>& query,
                                    double shrinkage = 1e-4) {
    const std::size_t n = samples.size();
    const std::size_t d = samples[0].size();

    std::vector<std::vector<double>> means(classes, std::vector<double>(d, 0.0));
    std::vector<double> counts(classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        counts[class_of[i]] += 1.0;
        for (std::size_t j = 0; j < d; ++j)
            means[class_of[i]][j] += samples[i][j];
    }
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t j = 0; j < d; ++j)
            means[c][j] /= counts[c];

    std::vector<std::vector<double>> pooled(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                pooled[a][b] += (samples[i][a] - means[class_of[i]][a]) *
                                (samples[i][b] - means[class_of[i]][b]);
    for (auto& row : pooled)
        for (double& v : row)
            v /= static_cast<double>(n - classes);

    double trace = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        trace += pooled[j][j];
    const double scale = trace > 0.0 ? trace / static_cast<double>(d) : 1.0;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            pooled[a][b] = (1.0 - shrinkage) * pooled[a][b] + (a == b ? shrinkage * scale : 0.0);

    const auto inv = gauss_jordan_inverse(pooled);
    std::size_t best = 0;
    double best_score = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
        std::vector<double> dev(d);
        for (std::size_t j = 0; j < d; ++j)
            dev[j] = query[j] - means[c][j];
        double mahalanobis = 0.0;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                mahalanobis += dev[a] * inv[a][b] * dev[b];
        const double score = -0.5 * mahalanobis + std::log(counts[c] / static_cast<double>(n));
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

/// Exhaustive nearest-neighbor scan.
inline std::size_t nearest_index(const std::vector<std::vector<double>>& train,
                                 const std::vector<double>& query) {
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double dist = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j)
            dist += (train[i][j] - query[j]) * (train[i][j] - query[j]);
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

} // namespace oracle
