#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairport/fair_projection.hpp"

namespace fairport {

/// Per-instance bias quantities. `d_b` is fair minus unfair: positive values
/// mean the projection raised the score (the instance was under-scored).
struct BiasRecord {
    std::string id;
    std::string group;
    double unfair = 0.0;
    double fair = 0.0;
    double d_b = 0.0;
    std::optional<double> counterfactual;  // T_{s->other}(unfair), two groups only
    std::optional<int> label;
};

enum class TaskKind { Discrimination, BiasSize, Outliers };

std::string_view to_string(TaskKind kind) noexcept;
/// Accepts "discrimination", "bias-size", "outliers" (underscores also accepted).
TaskKind parse_task_kind(std::string_view text);

struct TaskConfig {
    TaskKind kind = TaskKind::Discrimination;
    double alpha = 0.75;
};

struct LabelingResult {
    std::vector<BiasRecord> records;
    std::optional<double> tau;  // unset for the discrimination task
    std::size_t positives = 0;

    double positive_fraction() const noexcept {
        return records.empty() ? 0.0
                               : static_cast<double>(positives) / static_cast<double>(records.size());
    }
};

/// Fair score and d_B for every record; counterfactuals are filled in when the
/// calibrator has exactly two groups. Labels are left unset.
std::vector<BiasRecord> compute_db(const FairCalibrator& c, std::span<const ScoreRecord> records);

/// Q_other(F_group(score)): the equally-ranked score in the other group.
/// Throws InputError unless the calibrator has exactly two groups.
double transport_counterfactual(const FairCalibrator& c, double score, std::string_view group);

/// max_i |d_B - w_other * (T(unfair) - unfair)| over `records`. The identity is
/// exact at calibration sample points. Requires two groups.
double check_prop1(const FairCalibrator& c, std::span<const ScoreRecord> records);

/// Thresholded task labels:
///   discrimination  1{d_B >= 0}
///   bias-size       1{|d_B| >= tau}, tau = Q_{|d_B|}(alpha)
///   outliers        1{d_B^2 >= tau}, tau = Q_{d_B^2}(alpha)
/// tau uses the lower (type-1) quantile over `bias` itself.
LabelingResult label_tasks(std::vector<BiasRecord> bias, const TaskConfig& cfg);

/// Favoritism label, defined as the complement of the discrimination label.
inline int favoritism_label(const BiasRecord& r) noexcept { return r.d_b >= 0.0 ? 0 : 1; }

struct BiasDecomposition {
    double d_b = 0.0;
    double implicit_bias = 0.0;  // T(f(x,s)) - f(x,other)
    double explicit_bias = 0.0;  // f(x,other) - f(x,s)
    bool bound_ok = false;       // |d_B| <= w_other (|implicit| + |explicit|) + 1e-12
};

/// Splits the bias of one instance into implicit and explicit parts. The
/// caller supplies the base model's score with the attribute flipped.
BiasDecomposition decompose_bias(const FairCalibrator& c, double score_s, double score_other,
                                 std::string_view group);

/// CSV with header id,group,unfair_score,fair_score,d_b,label in input order.
/// Written atomically.
void export_task_dataset(std::span<const BiasRecord> records, const std::filesystem::path& dest);
std::vector<BiasRecord> read_task_dataset(const std::filesystem::path& src);

}  // namespace fairport
