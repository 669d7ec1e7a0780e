#include "fairport/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fairport/error.hpp"

namespace fairport {

namespace {

std::vector<double> sorted_copy(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return v;
}

void require_finite(std::span<const double> xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw InputError(std::string(what) + " contains a non-finite value");
    }
}

double ks_sorted(std::span<const double> a, std::span<const double> b) {
    // |i/n - j/m| = |i*m - j*n| / (n*m): track the integer numerator so the
    // result is the correctly rounded rational (k/n for equal sizes).
    const std::uint64_t n = a.size();
    const std::uint64_t m = b.size();
    std::size_t i = 0;
    std::size_t j = 0;
    std::uint64_t best = 0;
    // Step past every copy of the next merged value, then compare both ECDFs.
    while (i < a.size() || j < b.size()) {
        double t;
        if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
            t = a[i];
        } else {
            t = b[j];
        }
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        const std::uint64_t lhs = i * m;
        const std::uint64_t rhs = j * n;
        best = std::max(best, lhs > rhs ? lhs - rhs : rhs - lhs);
    }
    return static_cast<double>(best) / (static_cast<double>(n) * static_cast<double>(m));
}

void check_labels(std::span<const ScoreLabel> records) {
    for (const auto& r : records) {
        if (r.label != 0 && r.label != 1) {
            throw InputError("labels must be 0 or 1, got " + std::to_string(r.label));
        }
        if (!std::isfinite(r.score)) throw InputError("score must be finite");
    }
}

}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw InputError("two-sample KS needs two non-empty samples");
    }
    require_finite(a, "first sample");
    require_finite(b, "second sample");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    return ks_sorted(sa, sb);
}

double ks_two_sample(const Sample& a, const Sample& b) { return ks_sorted(a.values(), b.values()); }

UnfairnessResult unfairness(std::span<const ScoreGroup> records) {
    std::map<std::string, std::vector<double>> by_group;
    for (const auto& r : records) {
        if (!std::isfinite(r.score)) throw InputError("score must be finite");
        by_group[r.group].push_back(r.score);
    }
    if (by_group.size() < 2) {
        throw InputError("unfairness needs at least two groups, found " +
                         std::to_string(by_group.size()));
    }
    UnfairnessResult out;
    for (auto& [label, scores] : by_group) {
        std::sort(scores.begin(), scores.end());
        out.counts[label] = scores.size();
    }
    for (auto it = by_group.begin(); it != by_group.end(); ++it) {
        for (auto jt = std::next(it); jt != by_group.end(); ++jt) {
            const double ks = ks_sorted(it->second, jt->second);
            out.pairwise_ks[{it->first, jt->first}] = ks;
            out.unfairness = std::max(out.unfairness, ks);
        }
    }
    return out;
}

double auc(std::span<const ScoreLabel> records) {
    check_labels(records);
    std::vector<ScoreLabel> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.score < b.score; });
    double pos_total = 0.0;
    double neg_total = 0.0;
    double u = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        double pos = 0.0;
        double neg = 0.0;
        while (j < sorted.size() && sorted[j].score == sorted[i].score) {
            (sorted[j].label == 1 ? pos : neg) += 1.0;
            ++j;
        }
        u += pos * neg_total + 0.5 * pos * neg;
        pos_total += pos;
        neg_total += neg;
        i = j;
    }
    if (pos_total == 0.0 || neg_total == 0.0) {
        throw InputError("AUC needs both positive and negative labels");
    }
    return u / (pos_total * neg_total);
}

double squared_risk(std::span<const ScoreLabel> records) {
    if (records.empty()) throw InputError("squared risk of an empty set is undefined");
    check_labels(records);
    double acc = 0.0;
    for (const auto& r : records) {
        const double d = static_cast<double>(r.label) - r.score;
        acc += d * d;
    }
    return acc / static_cast<double>(records.size());
}

double hard_accuracy(std::span<const ScoreLabel> records, double threshold) {
    if (records.empty()) throw InputError("accuracy of an empty set is undefined");
    check_labels(records);
    std::size_t hits = 0;
    for (const auto& r : records) {
        const int predicted = r.score >= threshold ? 1 : 0;
        if (predicted == r.label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double w2_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw InputError("W2 distance needs two non-empty samples");
    }
    require_finite(a, "first sample");
    require_finite(b, "second sample");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    const std::uint64_t n = sa.size();
    const std::uint64_t m = sb.size();

    if (n == m) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = sa[k] - sb[k];
            acc += d * d;
        }
        return std::sqrt(acc / static_cast<double>(n));
    }

    // Quantile breakpoints i/n and j/m on the common grid 1/(n*m): a's k-th
    // breakpoint sits at k*m, b's at k*n. Q_a and Q_b are constant between.
    double acc = 0.0;
    std::uint64_t i = 0;
    std::uint64_t j = 0;
    std::uint64_t prev = 0;
    while (i < n && j < m) {
        const std::uint64_t next_a = (i + 1) * m;
        const std::uint64_t next_b = (j + 1) * n;
        const std::uint64_t next = std::min(next_a, next_b);
        const double d = sa[i] - sb[j];
        acc += static_cast<double>(next - prev) * d * d;
        prev = next;
        if (next_a == next) ++i;
        if (next_b == next) ++j;
    }
    return std::sqrt(acc / static_cast<double>(n * m));
}

double w2_distance(const Sample& a, const Sample& b) { return w2_distance(a.values(), b.values()); }

std::map<std::string, double> w2_to_barycenter(const FairCalibrator& calibrator) {
    // Every group quantile, and hence the barycenter quantile, is constant on
    // the intervals between consecutive levels k/N_s.
    std::vector<double> levels;
    for (const auto& g : calibrator.groups()) {
        const double n = static_cast<double>(g.count());
        for (std::size_t k = 1; k <= g.count(); ++k) levels.push_back(static_cast<double>(k) / n);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<double> acc(calibrator.groups().size(), 0.0);
    double prev = 0.0;
    for (double level : levels) {
        const double mass = level - prev;
        const double bary = calibrator.barycenter_quantile(level);
        for (std::size_t s = 0; s < acc.size(); ++s) {
            const double d = calibrator.groups()[s].quantile(level) - bary;
            acc[s] += mass * d * d;
        }
        prev = level;
    }
    std::map<std::string, double> out;
    for (std::size_t s = 0; s < acc.size(); ++s) {
        out[calibrator.groups()[s].label()] = std::sqrt(acc[s]);
    }
    return out;
}

AuditMetrics audit_metrics(std::span<const ScoreRecord> records, double threshold) {
    AuditMetrics m;
    if (records.empty()) return m;

    std::vector<ScoreGroup> grouped;
    std::vector<ScoreLabel> labeled;
    grouped.reserve(records.size());
    for (const auto& r : records) {
        grouped.push_back({r.score, r.group});
        if (r.label) labeled.push_back({r.score, *r.label});
        m.counts[r.group] += 1;
    }
    if (m.counts.size() >= 2) {
        auto u = unfairness(grouped);
        m.unfairness = u.unfairness;
        m.pairwise_ks = std::move(u.pairwise_ks);
    }
    if (!labeled.empty()) {
        m.risk = squared_risk(labeled);
        m.accuracy = hard_accuracy(labeled, threshold);
        const bool has_pos = std::any_of(labeled.begin(), labeled.end(), [](auto& r) { return r.label == 1; });
        const bool has_neg = std::any_of(labeled.begin(), labeled.end(), [](auto& r) { return r.label == 0; });
        if (has_pos && has_neg) m.auc = auc(labeled);
    }
    m.w2 = w2_to_barycenter(FairCalibrator::fit(records));
    return m;
}

}  // namespace fairport
