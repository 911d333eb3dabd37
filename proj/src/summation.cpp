#include "geoflow/summation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

namespace geoflow {

namespace {

constexpr std::size_t leaf_size = 32;

double neumaier(std::span<const double> xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double tree(std::span<const double> xs) {
    if (xs.size() <= leaf_size) return neumaier(xs);
    const std::size_t mid = xs.size() / 2;
    return tree(xs.first(mid)) + tree(xs.subspan(mid));
}

}  // namespace

double deterministic_sum(std::span<const double> terms) { return tree(terms); }

std::complex<double> deterministic_sum(std::span<const std::complex<double>> terms) {
    std::vector<double> re(terms.size()), im(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        re[i] = terms[i].real();
        im[i] = terms[i].imag();
    }
    return {tree(re), tree(im)};
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    const std::size_t threads = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t block = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t begin = t * block, end = std::min(count, begin + block);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace geoflow
