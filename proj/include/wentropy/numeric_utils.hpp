#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <locale>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace wentropy {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s += x;
    return s.value();
}

/// Sum that does not depend on the order of the input: values are sorted
/// before compensated accumulation.
inline double order_independent_sum(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return compensated_sum(xs);
}

/// 17 significant digits, locale independent.
inline std::string format_real(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << x;
    return os.str();
}

inline double relative_deviation(double a, double b, double floor = 0.0) {
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

/// SplitMix64: a tiny counter-friendly generator satisfying
/// UniformRandomBitGenerator. stream(seed, i) gives an independent,
/// reproducible stream for work item i.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 g(seed ^ 0x6a09e667f3bcc909ULL);
        const std::uint64_t a = g();
        return SplitMix64(a + index * 0x9e3779b97f4a7c15ULL);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

}  // namespace wentropy
