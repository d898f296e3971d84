#pragma once

#include <span>

namespace smartfog {

// Middle value; mean of the two middle values for even counts. 0 when empty.
double median(std::span<const double> values);

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> values);

} // namespace smartfog
