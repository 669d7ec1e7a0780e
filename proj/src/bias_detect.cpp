#include "fairport/bias_detect.hpp"

#include <algorithm>
#include <cmath>

#include "fairport/csv.hpp"
#include "fairport/empirical_dist.hpp"
#include "fairport/error.hpp"

namespace fairport {

namespace {

void require_two_groups(const FairCalibrator& c, const char* what) {
    if (c.groups().size() != 2) {
        throw InputError(std::string(what) + " is defined for exactly two groups, calibrator has " +
                         std::to_string(c.groups().size()));
    }
}

// Q_other(F_s(score)) with s given by index.
double counterfactual_at(const FairCalibrator& c, double score, std::size_t s) {
    const auto& groups = c.groups();
    const double level = groups[s].cdf(score);
    return groups[1 - s].quantile(level);
}

}  // namespace

std::string_view to_string(TaskKind kind) noexcept {
    switch (kind) {
        case TaskKind::Discrimination: return "discrimination";
        case TaskKind::BiasSize: return "bias-size";
        case TaskKind::Outliers: return "outliers";
    }
    return "unknown";
}

TaskKind parse_task_kind(std::string_view text) {
    if (text == "discrimination") return TaskKind::Discrimination;
    if (text == "bias-size" || text == "bias_size") return TaskKind::BiasSize;
    if (text == "outliers") return TaskKind::Outliers;
    throw InputError("unknown task '" + std::string(text) +
                     "' (expected discrimination, bias-size or outliers)");
}

std::vector<BiasRecord> compute_db(const FairCalibrator& c, std::span<const ScoreRecord> records) {
    const bool binary = c.groups().size() == 2;
    std::vector<BiasRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const auto idx = c.find_group(r.group);
        if (!idx) {
            throw UnknownGroupError("record '" + r.id + "' has unknown group '" + r.group + "'");
        }
        BiasRecord b;
        b.id = r.id;
        b.group = r.group;
        b.unfair = r.score;
        b.fair = c.transform_at(r.score, *idx);
        b.d_b = b.fair - b.unfair;
        if (binary) b.counterfactual = counterfactual_at(c, r.score, *idx);
        out.push_back(std::move(b));
    }
    return out;
}

double transport_counterfactual(const FairCalibrator& c, double score, std::string_view group) {
    require_two_groups(c, "the transport counterfactual");
    if (!(score >= 0.0 && score <= 1.0)) {
        throw InputError("score must lie in [0,1], got " + std::to_string(score));
    }
    return counterfactual_at(c, score, c.group_index(group));
}

double check_prop1(const FairCalibrator& c, std::span<const ScoreRecord> records) {
    require_two_groups(c, "the two-group bias identity");
    double worst = 0.0;
    for (const auto& r : records) {
        const std::size_t s = c.group_index(r.group);
        const double d_b = c.transform_at(r.score, s) - r.score;
        const double other_weight = c.groups()[1 - s].weight();
        const double rhs = other_weight * (counterfactual_at(c, r.score, s) - r.score);
        worst = std::max(worst, std::abs(d_b - rhs));
    }
    return worst;
}

LabelingResult label_tasks(std::vector<BiasRecord> bias, const TaskConfig& cfg) {
    if (bias.empty()) {
        throw InputError("cannot label an empty pool");
    }
    LabelingResult result;
    if (cfg.kind == TaskKind::Discrimination) {
        for (auto& b : bias) b.label = b.d_b >= 0.0 ? 1 : 0;
    } else {
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
            throw InputError("alpha must lie in (0,1), got " + std::to_string(cfg.alpha));
        }
        auto statistic = [&cfg](const BiasRecord& b) {
            return cfg.kind == TaskKind::BiasSize ? std::abs(b.d_b) : b.d_b * b.d_b;
        };
        std::vector<double> stats;
        stats.reserve(bias.size());
        for (const auto& b : bias) stats.push_back(statistic(b));
        std::sort(stats.begin(), stats.end());
        const double tau = lower_quantile(stats, cfg.alpha);
        for (auto& b : bias) b.label = statistic(b) >= tau ? 1 : 0;
        result.tau = tau;
    }
    for (const auto& b : bias) result.positives += static_cast<std::size_t>(*b.label);
    result.records = std::move(bias);
    return result;
}

BiasDecomposition decompose_bias(const FairCalibrator& c, double score_s, double score_other,
                                 std::string_view group) {
    require_two_groups(c, "the implicit/explicit decomposition");
    if (!(score_other >= 0.0 && score_other <= 1.0)) {
        throw InputError("counterfactual score must lie in [0,1], got " + std::to_string(score_other));
    }
    const std::size_t s = c.group_index(group);
    BiasDecomposition out;
    out.d_b = c.transform_at(score_s, s) - score_s;
    out.explicit_bias = score_other - score_s;
    out.implicit_bias = counterfactual_at(c, score_s, s) - score_other;
    const double bound =
        c.groups()[1 - s].weight() * (std::abs(out.implicit_bias) + std::abs(out.explicit_bias));
    out.bound_ok = std::abs(out.d_b) <= bound + 1e-12;
    return out;
}

void export_task_dataset(std::span<const BiasRecord> records, const std::filesystem::path& dest) {
    std::string out;
    append_csv_row(out, {"id", "group", "unfair_score", "fair_score", "d_b", "label"});
    for (const auto& r : records) {
        if (!r.label) {
            throw InputError("record '" + r.id + "' has no task label");
        }
        append_csv_row(out, {r.id, r.group, format_real(r.unfair), format_real(r.fair),
                             format_real(r.d_b), std::to_string(*r.label)});
    }
    atomic_write(dest, out);
}

std::vector<BiasRecord> read_task_dataset(const std::filesystem::path& src) {
    const CsvTable table = read_csv(src);
    const char* names[] = {"id", "group", "unfair_score", "fair_score", "d_b", "label"};
    std::size_t cols[6];
    for (int k = 0; k < 6; ++k) {
        auto c = table.column(names[k]);
        if (!c) throw InputError(src.string() + ": missing column '" + names[k] + "'");
        cols[k] = *c;
    }
    std::vector<BiasRecord> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        auto num = [&](int k) {
            auto v = parse_real(row[cols[k]]);
            if (!v) {
                throw InputError(src.string() + ": line " + std::to_string(table.lines[i]) +
                                 ": bad number in column '" + names[k] + "'");
            }
            return *v;
        };
        BiasRecord r;
        r.id = row[cols[0]];
        r.group = row[cols[1]];
        r.unfair = num(2);
        r.fair = num(3);
        r.d_b = num(4);
        const auto& lab = row[cols[5]];
        if (lab != "0" && lab != "1") {
            throw InputError(src.string() + ": line " + std::to_string(table.lines[i]) +
                             ": label must be 0 or 1");
        }
        r.label = lab == "1" ? 1 : 0;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace fairport
