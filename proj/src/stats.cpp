#include "smartfog/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace smartfog {

double median(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    std::vector<double> v(values.begin(), values.end());
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    if (v.size() % 2 == 1) {
        return v[mid];
    }
    const double upper = v[mid];
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double stddev(std::span<const double> values) {
    if (values.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (const double x : values) {
        mean += x;
    }
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (const double x : values) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

} // namespace smartfog
