#include "fairport/empirical_dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairport/error.hpp"
#include "fairport/random.hpp"

namespace fairport {

namespace {

void validate(const std::vector<double>& values) {
    if (values.empty()) {
        throw InputError("sample must contain at least one value");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = values[i];
        if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
            throw InputError("sample value at position " + std::to_string(i) +
                             " is outside [0,1]: " + std::to_string(x));
        }
    }
}

// Smallest k in [1,n] with k/n >= v, using the same k/n arithmetic as the CDF
// so that Q(F(x)) = x holds bit-exactly.
std::size_t lower_rank(std::size_t n, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("quantile level must lie in [0,1], got " + std::to_string(v));
    }
    const double dn = static_cast<double>(n);
    auto level = [dn](std::size_t k) { return static_cast<double>(k) / dn; };
    auto k = static_cast<std::size_t>(std::ceil(v * dn));
    k = std::clamp<std::size_t>(k, 1, n);
    while (k > 1 && level(k - 1) >= v) --k;
    while (k < n && level(k) < v) ++k;
    return k;
}

}  // namespace

Sample Sample::from_unsorted(std::vector<double> values) {
    validate(values);
    std::sort(values.begin(), values.end());
    return Sample(std::make_shared<const std::vector<double>>(std::move(values)));
}

Sample Sample::from_sorted(std::vector<double> values) {
    validate(values);
    if (!std::is_sorted(values.begin(), values.end())) {
        throw InputError("sample values are not sorted ascending");
    }
    return Sample(std::make_shared<const std::vector<double>>(std::move(values)));
}

std::size_t StepCdf::count_at_or_below(double u) const noexcept {
    const auto v = sample_.values();
    return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), u) - v.begin());
}

double StepCdf::operator()(double u) const noexcept {
    return static_cast<double>(count_at_or_below(u)) / static_cast<double>(sample_.size());
}

std::size_t StepQuantile::rank(double v) const { return lower_rank(sample_.size(), v); }

double StepQuantile::operator()(double v) const { return sample_[rank(v) - 1]; }

double cdf_eval(const StepCdf& cdf, double u) noexcept { return cdf(u); }

double quantile_eval(const StepQuantile& q, double v) { return q(v); }

double lower_quantile(std::span<const double> sorted, double v) {
    if (sorted.empty()) {
        throw InputError("quantile of an empty sample is undefined");
    }
    return sorted[lower_rank(sorted.size(), v) - 1];
}

Sample jitter(const Sample& s, double epsilon, std::uint64_t seed) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw InputError("jitter epsilon must be a positive finite number");
    }
    Rng rng(seed);
    std::vector<double> out(s.values().begin(), s.values().end());
    for (double& x : out) {
        const double noise = epsilon * (2.0 * uniform_open01(rng) - 1.0);
        x = std::clamp(x + noise, 0.0, 1.0);
    }
    return Sample::from_unsorted(std::move(out));
}

}  // namespace fairport
