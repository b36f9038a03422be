#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catex/errors.hpp"

namespace catex::formal {

using Sequence = std::vector<long long>;

/// First-order finite difference: out[i] = x[i+1] - x[i].
inline Sequence diff(const Sequence& x) {
    if (x.size() < 2)
        throw ValidationError("diff: need at least 2 elements");
    Sequence out(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        out[i] = x[i + 1] - x[i];
    return out;
}

/// Elementwise strict Heaviside step: 1 for positive values, 0 otherwise.
inline Sequence heaviside(const Sequence& x) {
    Sequence out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] > 0 ? 1 : 0;
    return out;
}

/// The 1-D binary-pattern operator at each interior point:
/// L(x_i) = H(x_{i-1} - x_i) + 2 * H(x_{i+1} - x_i).
/// Output length shrinks by 2. Expressed through the difference operator
/// this is H(-D(x_{i-1})) + 2 * H(D(x_i)).
inline Sequence l_operator(const Sequence& x) {
    if (x.size() < 3)
        throw ValidationError("l_operator: need at least 3 elements");
    Sequence out(x.size() - 2);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const long long left = x[i - 1] - x[i] > 0 ? 1 : 0;
        const long long right = x[i + 1] - x[i] > 0 ? 1 : 0;
        out[i - 1] = left + 2 * right;
    }
    return out;
}

/// Outcome of one exhaustive check over all integer sequences of a given
/// length with values in [0, max_value].
struct VerificationReport {
    std::string check;
    int max_value = 0;
    int length = 0;
    std::uint64_t total_sequences = 0;
    std::uint64_t triggered = 0; // interior points where the antecedent held
    std::uint64_t violations = 0;

    bool passed() const { return violations == 0; }
};

namespace formal_detail {

inline constexpr std::uint64_t kMaxEnumeration = 200'000'000;

inline std::uint64_t enumeration_size(int max_value, int length) {
    if (max_value < 1)
        throw ValidationError("verification: max_value must be at least 1");
    if (length < 3)
        throw ValidationError("verification: length must be at least 3");
    std::uint64_t size = 1;
    for (int i = 0; i < length; ++i) {
        size *= static_cast<std::uint64_t>(max_value) + 1;
        if (size > kMaxEnumeration)
            throw ValidationError("verification: search space too large to enumerate");
    }
    return size;
}

/// Runs `check(x)` over every sequence; check inspects one sequence and
/// accumulates into the report.
template <typename Check>
VerificationReport enumerate(const std::string& name, int max_value, int length, Check check) {
    VerificationReport report;
    report.check = name;
    report.max_value = max_value;
    report.length = length;
    report.total_sequences = enumeration_size(max_value, length);

    Sequence x(length, 0);
    while (true) {
        check(x, report);
        int pos = length - 1;
        while (pos >= 0 && x[pos] == max_value)
            x[pos--] = 0;
        if (pos < 0) break;
        ++x[pos];
    }
    return report;
}

// Second difference at interior index i of x, via x_{i-1} + x_{i+1} - 2 x_i.
inline long long second_difference(const Sequence& x, std::size_t i) {
    return x[i - 1] + x[i + 1] - 2 * x[i];
}

} // namespace formal_detail

/// Exhaustively checks that D(H(D(x)))_i = 1 implies D^2(x)_i > 0.
inline VerificationReport verify_lemma1(int max_value, int length) {
    return formal_detail::enumerate(
        "lemma1", max_value, length, [](const Sequence& x, VerificationReport& report) {
            const Sequence dh = diff(heaviside(diff(x)));
            for (std::size_t j = 0; j < dh.size(); ++j) {
                if (dh[j] != 1) continue;
                ++report.triggered;
                if (formal_detail::second_difference(x, j + 1) <= 0)
                    ++report.violations;
            }
        });
}

/// Exhaustively checks that D(H(D(x)))_i = -1 implies D^2(x)_i < 0.
inline VerificationReport verify_lemma2(int max_value, int length) {
    return formal_detail::enumerate(
        "lemma2", max_value, length, [](const Sequence& x, VerificationReport& report) {
            const Sequence dh = diff(heaviside(diff(x)));
            for (std::size_t j = 0; j < dh.size(); ++j) {
                if (dh[j] != -1) continue;
                ++report.triggered;
                if (formal_detail::second_difference(x, j + 1) >= 0)
                    ++report.violations;
            }
        });
}

/// Exhaustively checks the monotone case: where D(H(D(x)))_i = 0, the two
/// surrounding first differences agree in sign under the strict step
/// function, i.e. both positive or both non-positive.
inline VerificationReport verify_monotone_case(int max_value, int length) {
    return formal_detail::enumerate(
        "monotone", max_value, length, [](const Sequence& x, VerificationReport& report) {
            const Sequence d = diff(x);
            const Sequence dh = diff(heaviside(d));
            for (std::size_t j = 0; j < dh.size(); ++j) {
                if (dh[j] != 0) continue;
                ++report.triggered;
                const bool both_positive = d[j] > 0 && d[j + 1] > 0;
                const bool both_non_positive = d[j] <= 0 && d[j + 1] <= 0;
                if (!both_positive && !both_non_positive)
                    ++report.violations;
            }
        });
}

} // namespace catex::formal
