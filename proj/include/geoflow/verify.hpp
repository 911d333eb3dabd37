#pragma once

// Self-check suites over the library's identities. Each property reports the
// worst observed error against its threshold.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "geoflow/rootdata.hpp"

namespace geoflow::verify {

struct PropertyResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double error = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct Options {
    int n = 0;  // 0 runs n = 1, 2, 3
    int workers = 1;
    std::uint64_t seed = 1;
};

// Suites: rep, specfun, zeta, all. Throws InputError for other names.
std::vector<PropertyResult> run(std::string_view suite, const Options& options = {});

// GEOFLOW_VERIFY_FAULT=1 flips one sign per suite so the harness can be seen to fail.
bool fault_injected();

// All dominant weights of the group with |entries| <= bound, integral and half-integral.
std::vector<rootdata::Irrep> irrep_corpus(const rootdata::GroupDesc& group, int bound);

}  // namespace geoflow::verify
