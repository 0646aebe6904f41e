#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace survkit {

inline constexpr const char* kVersion = "0.1.0";

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Bad command line / config file contents.  CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.  CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (divergence, singularity, undefined estimate).  CLI exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic sum: fixed reduction tree, independent of accumulation quirks
// a naive left fold would share anyway; kept for the parallel reducers so the
// threaded and serial paths add in the same order.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

// Linear-interpolation quantile (R type 7).  q in [0,1]; x need not be sorted.
double quantile(std::vector<double> x, double q);

// FNV-1a 64-bit, used for artifact manifests.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex(const std::string& bytes);

// Fixed-format float for CSV/SVG output so reruns are byte-identical.
std::string fmt_num(double v);

}  // namespace survkit
