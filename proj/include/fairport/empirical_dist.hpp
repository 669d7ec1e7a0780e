#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace fairport {

/// A finite, sorted sample of scores in [0,1].
///
/// The backing storage is shared and immutable, so copies are cheap and a
/// Sample can be read from many threads at once.
class Sample {
public:
    /// Sorts `values`. Throws InputError when empty, non-finite or outside [0,1].
    static Sample from_unsorted(std::vector<double> values);
    /// Same checks as from_unsorted, plus a sortedness check instead of a sort.
    static Sample from_sorted(std::vector<double> values);

    std::span<const double> values() const noexcept { return *values_; }
    std::size_t size() const noexcept { return values_->size(); }
    double min() const noexcept { return values_->front(); }
    double max() const noexcept { return values_->back(); }
    double operator[](std::size_t i) const noexcept { return (*values_)[i]; }

private:
    explicit Sample(std::shared_ptr<const std::vector<double>> v) : values_(std::move(v)) {}
    std::shared_ptr<const std::vector<double>> values_;
};

/// Right-continuous step ECDF: F(u) = #{x_i <= u} / n.
class StepCdf {
public:
    explicit StepCdf(Sample sample) : sample_(std::move(sample)) {}

    double operator()(double u) const noexcept;
    /// #{x_i <= u}; the numerator of operator().
    std::size_t count_at_or_below(double u) const noexcept;
    const Sample& sample() const noexcept { return sample_; }

private:
    Sample sample_;
};

/// Lower (type-1) generalized inverse Q(v) = inf{u : F(u) >= v}, Q(0) = min.
class StepQuantile {
public:
    explicit StepQuantile(Sample sample) : sample_(std::move(sample)) {}

    /// Throws InputError for v outside [0,1].
    double operator()(double v) const;
    /// 1-based rank k of the returned order statistic: smallest k with k/n >= v.
    std::size_t rank(double v) const;
    const Sample& sample() const noexcept { return sample_; }

private:
    Sample sample_;
};

// Free-function forms.
double cdf_eval(const StepCdf& cdf, double u) noexcept;
double quantile_eval(const StepQuantile& q, double v);

/// Type-1 quantile over an arbitrary finite real sample (not restricted to
/// [0,1]). `sorted` must be ascending and non-empty.
double lower_quantile(std::span<const double> sorted, double v);

/// Adds i.i.d. uniform noise on (-epsilon, +epsilon), clamps to [0,1] and
/// re-sorts. Deterministic for a given seed.
Sample jitter(const Sample& s, double epsilon, std::uint64_t seed);

}  // namespace fairport
