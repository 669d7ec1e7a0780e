#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairport/empirical_dist.hpp"

namespace fairport {

/// One scored instance. `score` is the base model output in [0,1].
struct ScoreRecord {
    std::string id;
    double score = 0.0;
    std::string group;
    std::optional<int> label;
};

struct JitterConfig {
    double epsilon = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const JitterConfig&) const = default;
};

/// Calibration scores of one group together with its pool frequency.
class GroupDistribution {
public:
    GroupDistribution(std::string label, Sample sample, double weight);

    const std::string& label() const noexcept { return label_; }
    const Sample& sample() const noexcept { return cdf_.sample(); }
    double weight() const noexcept { return weight_; }
    std::size_t count() const noexcept { return cdf_.sample().size(); }

    double cdf(double u) const noexcept { return cdf_(u); }
    double quantile(double v) const { return quantile_(v); }

private:
    std::string label_;
    StepCdf cdf_;
    StepQuantile quantile_;
    double weight_;
};

/// The fitted barycenter projection
///     score -> (sum_s' w_s' Q_s') (F_group(score)).
///
/// Immutable after construction; every method is const and thread-safe.
class FairCalibrator {
public:
    /// Fits one GroupDistribution per group found in `pool`. Groups are kept in
    /// lexicographic label order. When `declared_groups` is non-empty every
    /// declared label must be observed and no other label may appear.
    static FairCalibrator fit(std::span<const ScoreRecord> pool,
                              std::optional<JitterConfig> jitter = std::nullopt,
                              std::span<const std::string> declared_groups = {});

    /// Rebuilds a calibrator from already-fitted parts (used by persistence).
    /// Weights must be positive and sum to one within 1e-12.
    static FairCalibrator from_groups(std::vector<GroupDistribution> groups,
                                      std::optional<JitterConfig> jitter);

    double transform(double score, std::string_view group) const;
    double transform_at(double score, std::size_t group_index) const;

    /// Element-wise transform; returns (id, fair score) in input order. The
    /// first record with an unknown group aborts with an error naming its id.
    std::vector<std::pair<std::string, double>> transform_batch(
        std::span<const ScoreRecord> records) const;

    /// Quantile function of the weighted barycenter: sum_s w_s Q_s(v).
    double barycenter_quantile(double v) const;

    /// Index of `group`, or nullopt when the label is unknown.
    std::optional<std::size_t> find_group(std::string_view group) const noexcept;
    std::size_t group_index(std::string_view group) const;  // throws UnknownGroupError

    std::span<const GroupDistribution> groups() const noexcept { return groups_; }
    const GroupDistribution& group(std::string_view label) const;
    std::size_t total_count() const noexcept { return total_; }
    const std::optional<JitterConfig>& jitter() const noexcept { return jitter_; }

    /// Smallest and largest calibration score over all groups.
    std::pair<double, double> support() const noexcept { return support_; }

private:
    FairCalibrator(std::vector<GroupDistribution> groups, std::optional<JitterConfig> jitter);

    std::vector<GroupDistribution> groups_;
    std::optional<JitterConfig> jitter_;
    std::size_t total_ = 0;
    std::pair<double, double> support_{0.0, 1.0};
};

}  // namespace fairport
