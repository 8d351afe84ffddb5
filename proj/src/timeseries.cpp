#include "genmotif/timeseries.hpp"

#include <algorithm>
#include <cmath>

namespace genmotif {

std::int64_t shared_samples(const Interval& a, const Interval& b) {
    const std::int64_t lo = std::max(a.start, b.start);
    const std::int64_t hi = std::min(a.start + a.length, b.start + b.length);
    return std::max<std::int64_t>(0, hi - lo);
}

TimeSeries::TimeSeries(std::vector<double> values, std::size_t dims)
    : values_(std::move(values)), dims_(dims), length_(dims == 0 ? 0 : values_.size() / dims) {
    if (dims_ == 0) throw std::invalid_argument("time series needs at least one dimension");
    if (values_.empty()) throw std::invalid_argument("time series needs at least one sample");
    if (values_.size() % dims_ != 0)
        throw std::invalid_argument("sample count is not a multiple of the dimension count");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("time series contains a non-finite sample");
    }
}

TimeSeries TimeSeries::univariate(std::vector<double> values) {
    return TimeSeries(std::move(values), 1);
}

Segment::Segment(std::vector<double> values, std::size_t dims, Interval origin)
    : values_(std::move(values)), dims_(dims), origin_(origin) {
    if (dims_ == 0 || values_.empty() || values_.size() % dims_ != 0)
        throw std::invalid_argument("segment shape is inconsistent");
}

Segment extract_segment(const TimeSeries& z, std::int64_t start, std::int64_t length) {
    const auto n = static_cast<std::int64_t>(z.length());
    if (length < 1 || start < 1 || start + length - 1 > n) {
        throw std::out_of_range("segment [" + std::to_string(start) + ", " +
                                std::to_string(start + length - 1) + "] outside series of length " +
                                std::to_string(n));
    }
    const std::size_t d = z.dims();
    auto all = z.values();
    auto first = all.begin() + static_cast<std::ptrdiff_t>((start - 1) * static_cast<std::int64_t>(d));
    std::vector<double> values(first, first + static_cast<std::ptrdiff_t>(length * static_cast<std::int64_t>(d)));
    return Segment(std::move(values), d, {start, length});
}

Segment resample_linear(const Segment& x, std::size_t target_length) {
    const std::size_t len = x.length();
    const std::size_t d = x.dims();
    if (target_length == 0) throw std::invalid_argument("cannot resample to zero samples");
    if (target_length == len) return x;

    std::vector<double> out(target_length * d);
    if (len == 1 || target_length == 1) {
        for (std::size_t t = 0; t < target_length; ++t)
            for (std::size_t k = 0; k < d; ++k) out[t * d + k] = x(0, k);
        return Segment(std::move(out), d, x.origin());
    }

    const double step = static_cast<double>(len - 1) / static_cast<double>(target_length - 1);
    for (std::size_t t = 0; t < target_length; ++t) {
        if (t == target_length - 1) {
            for (std::size_t k = 0; k < d; ++k) out[t * d + k] = x(len - 1, k);
            continue;
        }
        const double pos = static_cast<double>(t) * step;
        auto i = static_cast<std::size_t>(pos);
        if (i >= len - 1) i = len - 2;
        const double w = pos - static_cast<double>(i);
        for (std::size_t k = 0; k < d; ++k)
            out[t * d + k] = (1.0 - w) * x(i, k) + w * x(i + 1, k);
    }
    return Segment(std::move(out), d, x.origin());
}

Segment upsample_linear(const Segment& x, std::size_t target_length) {
    if (target_length < x.length()) {
        throw std::invalid_argument("upsample target " + std::to_string(target_length) +
                                    " is shorter than the segment (" + std::to_string(x.length()) + ")");
    }
    return resample_linear(x, target_length);
}

Segment znormalize(Segment x) {
    const std::size_t len = x.length();
    const std::size_t d = x.dims();
    for (std::size_t k = 0; k < d; ++k) {
        double mean = 0.0;
        for (std::size_t t = 0; t < len; ++t) mean += x(t, k);
        mean /= static_cast<double>(len);
        double var = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            const double c = x(t, k) - mean;
            var += c * c;
        }
        const double sd = std::sqrt(var / static_cast<double>(len));
        if (sd < kDegenerateStd) {
            for (std::size_t t = 0; t < len; ++t) x(t, k) = 0.0;
        } else {
            for (std::size_t t = 0; t < len; ++t) x(t, k) = (x(t, k) - mean) / sd;
        }
    }
    return x;
}

bool some_overlap(std::span<const Gene> genes, double tolerance) {
    for (std::size_t i = 0; i < genes.size(); ++i) {
        for (std::size_t j = i + 1; j < genes.size(); ++j) {
            const std::int64_t shared = shared_samples(genes[i].interval(), genes[j].interval());
            if (shared == 0) continue;
            const auto shorter = static_cast<double>(std::min(genes[i].length, genes[j].length));
            const auto allowed = static_cast<std::int64_t>(std::floor(tolerance * shorter));
            if (shared > allowed) return true;
        }
    }
    return false;
}

}  // namespace genmotif
