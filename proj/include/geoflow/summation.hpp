#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace geoflow {

// Fixed pairwise tree over the input order with Neumaier-compensated leaves.
// The result depends only on the sequence, never on how it was produced.
std::complex<double> deterministic_sum(std::span<const std::complex<double>> terms);
double deterministic_sum(std::span<const double> terms);

// Runs body(i) for i in [0, count) on up to `workers` threads (static blocks).
// Exceptions are rethrown on the calling thread, lowest index first.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace geoflow
