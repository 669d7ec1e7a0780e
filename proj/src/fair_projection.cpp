#include "fairport/fair_projection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fairport/error.hpp"
#include "fairport/random.hpp"

namespace fairport {

GroupDistribution::GroupDistribution(std::string label, Sample sample, double weight)
    : label_(std::move(label)), cdf_(sample), quantile_(std::move(sample)), weight_(weight) {}

FairCalibrator::FairCalibrator(std::vector<GroupDistribution> groups,
                               std::optional<JitterConfig> jitter)
    : groups_(std::move(groups)), jitter_(jitter) {
    if (groups_.empty()) {
        throw InputError("a calibrator needs at least one group");
    }
    std::sort(groups_.begin(), groups_.end(),
              [](const auto& a, const auto& b) { return a.label() < b.label(); });
    double weight_sum = 0.0;
    double lo = 1.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        const auto& g = groups_[i];
        if (i > 0 && groups_[i - 1].label() == g.label()) {
            throw InputError("duplicate group label '" + g.label() + "'");
        }
        if (!(g.weight() > 0.0)) {
            throw InputError("group '" + g.label() + "' has non-positive weight");
        }
        weight_sum += g.weight();
        total_ += g.count();
        lo = std::min(lo, g.sample().min());
        hi = std::max(hi, g.sample().max());
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        throw InputError("group weights must sum to 1, got " + std::to_string(weight_sum));
    }
    support_ = {lo, hi};
}

FairCalibrator FairCalibrator::fit(std::span<const ScoreRecord> pool,
                                   std::optional<JitterConfig> jitter,
                                   std::span<const std::string> declared_groups) {
    if (pool.empty()) {
        throw InputError("calibration pool is empty");
    }
    std::map<std::string, std::vector<double>, std::less<>> by_group;
    for (const auto& label : declared_groups) by_group[label];
    for (const auto& r : pool) {
        if (!declared_groups.empty() && !by_group.contains(r.group)) {
            throw UnknownGroupError("record '" + r.id + "' has undeclared group '" + r.group + "'");
        }
        by_group[r.group].push_back(r.score);
    }

    const double n = static_cast<double>(pool.size());
    std::vector<GroupDistribution> groups;
    groups.reserve(by_group.size());
    std::uint64_t index = 0;
    for (auto& [label, scores] : by_group) {
        if (scores.empty()) {
            throw InputError("group '" + label + "' has no observations in the pool");
        }
        const double weight = static_cast<double>(scores.size()) / n;
        Sample sample = Sample::from_unsorted(std::move(scores));
        if (jitter) {
            sample = fairport::jitter(sample, jitter->epsilon, mix_seed(jitter->seed, index));
        }
        groups.emplace_back(label, std::move(sample), weight);
        ++index;
    }
    return FairCalibrator(std::move(groups), jitter);
}

FairCalibrator FairCalibrator::from_groups(std::vector<GroupDistribution> groups,
                                           std::optional<JitterConfig> jitter) {
    return FairCalibrator(std::move(groups), jitter);
}

std::optional<std::size_t> FairCalibrator::find_group(std::string_view group) const noexcept {
    auto it = std::lower_bound(groups_.begin(), groups_.end(), group,
                               [](const auto& g, std::string_view l) { return g.label() < l; });
    if (it == groups_.end() || it->label() != group) return std::nullopt;
    return static_cast<std::size_t>(it - groups_.begin());
}

std::size_t FairCalibrator::group_index(std::string_view group) const {
    if (auto i = find_group(group)) return *i;
    throw UnknownGroupError("unknown group '" + std::string(group) + "'");
}

const GroupDistribution& FairCalibrator::group(std::string_view label) const {
    return groups_[group_index(label)];
}

double FairCalibrator::barycenter_quantile(double v) const {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("quantile level must lie in [0,1], got " + std::to_string(v));
    }
    // Weighted mean taken relative to the first quantile, so equal quantiles
    // come back exactly instead of as a rounded sum of weights.
    const double ref = groups_.front().quantile(v);
    double acc = 0.0;
    for (std::size_t i = 1; i < groups_.size(); ++i) {
        acc += groups_[i].weight() * (groups_[i].quantile(v) - ref);
    }
    // Rounding may still step just outside the support.
    return std::clamp(ref + acc, support_.first, support_.second);
}

double FairCalibrator::transform_at(double score, std::size_t group_index) const {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw InputError("score must lie in [0,1], got " + std::to_string(score));
    }
    return barycenter_quantile(groups_.at(group_index).cdf(score));
}

double FairCalibrator::transform(double score, std::string_view group) const {
    return transform_at(score, group_index(group));
}

std::vector<std::pair<std::string, double>> FairCalibrator::transform_batch(
    std::span<const ScoreRecord> records) const {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const auto idx = find_group(r.group);
        if (!idx) {
            throw UnknownGroupError("record '" + r.id + "' has unknown group '" + r.group + "'");
        }
        out.emplace_back(r.id, transform_at(r.score, *idx));
    }
    return out;
}

}  // namespace fairport
