#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairport/empirical_dist.hpp"
#include "fairport/fair_projection.hpp"

namespace fairport {

struct ScoreGroup {
    double score = 0.0;
    std::string group;
};

struct ScoreLabel {
    double score = 0.0;
    int label = 0;
};

/// sup_t |F_a(t) - F_b(t)|, evaluated exactly at the merged sample points.
/// Inputs need not be sorted; throws InputError when either is empty.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_two_sample(const Sample& a, const Sample& b);

struct UnfairnessResult {
    double unfairness = 0.0;
    /// Keyed by (g1, g2) with g1 < g2.
    std::map<std::pair<std::string, std::string>, double> pairwise_ks;
    std::map<std::string, std::size_t> counts;
};

/// Max over group pairs of the two-sample KS statistic. Needs >= 2 groups.
UnfairnessResult unfairness(std::span<const ScoreGroup> records);

/// Mann-Whitney AUC with ties counted as 1/2. Needs both classes.
double auc(std::span<const ScoreLabel> records);

/// Mean of (label - score)^2.
double squared_risk(std::span<const ScoreLabel> records);

/// Fraction of records with 1{score >= threshold} == label.
double hard_accuracy(std::span<const ScoreLabel> records, double threshold = 0.5);

/// 1-D Wasserstein-2 distance between the empirical measures of `a` and `b`
/// (any finite reals). Equal sizes use the sorted pairing; unequal sizes
/// integrate (Q_a - Q_b)^2 exactly over the merged quantile breakpoints.
double w2_distance(std::span<const double> a, std::span<const double> b);
double w2_distance(const Sample& a, const Sample& b);

/// W2 from each group's calibration distribution to the weighted barycenter.
std::map<std::string, double> w2_to_barycenter(const FairCalibrator& calibrator);

/// Metrics for one set of scores.
struct AuditMetrics {
    std::optional<double> unfairness;  // empty with fewer than two groups
    std::map<std::pair<std::string, std::string>, double> pairwise_ks;
    std::optional<double> auc;   // needs labels of both classes
    std::optional<double> risk;  // needs labels
    std::optional<double> accuracy;
    std::map<std::string, double> w2;  // group -> W2 to barycenter
    std::map<std::string, std::size_t> counts;
};

/// Audit of a scored dataset before and after the fairness projection.
struct AuditReport {
    AuditMetrics before;
    std::optional<AuditMetrics> after;
    double threshold = 0.5;
    std::optional<double> timing_ms;  // fit + transform wall clock
    std::vector<std::string> warnings;
};

/// Computes AuditMetrics for `records` (score, group, optional label).
/// W2 distances are taken against the barycenter of `records` themselves.
AuditMetrics audit_metrics(std::span<const ScoreRecord> records, double threshold = 0.5);

}  // namespace fairport
