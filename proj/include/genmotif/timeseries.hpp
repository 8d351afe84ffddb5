#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace genmotif {

/// Closed sample interval [start, start + length - 1], 1-based.
struct Interval {
    std::int64_t start = 1;
    std::int64_t length = 1;

    std::int64_t last() const { return start + length - 1; }
};

/// Number of samples shared by two intervals.
std::int64_t shared_samples(const Interval& a, const Interval& b);

/// A sampled signal of n time steps and d dimensions, stored row-major
/// (one row per time step). Immutable after construction.
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, std::size_t dims);

    /// Convenience constructor for a one-dimensional series.
    static TimeSeries univariate(std::vector<double> values);

    std::size_t length() const { return length_; }
    std::size_t dims() const { return dims_; }

    /// Sample at 1-based time index t, dimension dim (0-based).
    double at(std::int64_t t, std::size_t dim = 0) const {
        return values_[static_cast<std::size_t>(t - 1) * dims_ + dim];
    }

    std::span<const double> values() const { return values_; }

private:
    std::vector<double> values_;
    std::size_t dims_;
    std::size_t length_;
};

/// A copy of a slice of a TimeSeries, possibly resampled. Row-major L x d.
class Segment {
public:
    Segment() = default;
    Segment(std::vector<double> values, std::size_t dims, Interval origin);

    /// Current (possibly resampled) length L.
    std::size_t length() const { return dims_ == 0 ? 0 : values_.size() / dims_; }
    std::size_t dims() const { return dims_; }
    const Interval& origin() const { return origin_; }

    double operator()(std::size_t t, std::size_t dim) const { return values_[t * dims_ + dim]; }
    double& operator()(std::size_t t, std::size_t dim) { return values_[t * dims_ + dim]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool same_shape(const Segment& other) const {
        return dims_ == other.dims_ && values_.size() == other.values_.size();
    }

private:
    std::vector<double> values_;
    std::size_t dims_ = 0;
    Interval origin_;
};

/// One GA gene: a candidate segment (start, length) plus the real-valued
/// indicator that decides which motif group the segment joins.
struct Gene {
    std::int64_t start = 1;
    std::int64_t length = 1;
    double indicator = 0.0;

    Interval interval() const { return {start, length}; }

    friend bool operator==(const Gene&, const Gene&) = default;
};

/// A GA individual: exactly k*s genes.
using Solution = std::vector<Gene>;

/// Variance floor below which a dimension is treated as constant.
inline constexpr double kDegenerateStd = 1e-12;

/// Copies rows start..start+length-1 of z. Throws std::out_of_range when the
/// interval does not lie inside [1, n].
Segment extract_segment(const TimeSeries& z, std::int64_t start, std::int64_t length);

/// Linearly resamples every dimension of x onto target_length equally spaced
/// points spanning the original index range. Endpoints are preserved exactly.
/// Works in both directions; see upsample_linear for the checked variant.
Segment resample_linear(const Segment& x, std::size_t target_length);

/// resample_linear restricted to target_length >= x.length(); throws
/// std::invalid_argument otherwise.
Segment upsample_linear(const Segment& x, std::size_t target_length);

/// Per-dimension z-normalization with the population standard deviation.
/// Dimensions whose deviation is below kDegenerateStd become all zeros.
Segment znormalize(Segment x);

/// True iff any pair of genes shares more than
/// floor(tolerance * min(l_i, l_j)) samples.
bool some_overlap(std::span<const Gene> genes, double tolerance = 0.0);

/// Error raised while ingesting a CSV series; carries the offending line.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads one row per time step, one column per dimension. A single leading
/// header row is skipped when it is not numeric.
TimeSeries read_csv(const std::string& path);
TimeSeries parse_csv(const std::string& text);

/// Writes the series as plain CSV, optionally preceded by a header row.
void write_csv(const TimeSeries& z, const std::string& path,
               const std::vector<std::string>& header = {});

}  // namespace genmotif
