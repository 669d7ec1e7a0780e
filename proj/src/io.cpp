#include "fairport/io.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "fairport/error.hpp"

namespace fairport {

using json = nlohmann::ordered_json;

namespace {

std::string where(const CsvTable& t, std::size_t row) {
    return "line " + std::to_string(t.lines[row]);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json mean_sd_json(const MeanSd& m) { return json{{"mean", m.mean}, {"sd", m.sd}}; }

json optional_mean_sd(const std::optional<MeanSd>& m) { return m ? mean_sd_json(*m) : json(nullptr); }

json ranks_json(const std::map<std::string, RankAgreement>& ranks) {
    json out = json::object();
    for (const auto& [label, r] : ranks) {
        out[label] = json{{"concordant", r.concordant},
                          {"discordant", r.discordant},
                          {"post_ties", r.post_ties},
                          {"monotone", r.monotone()},
                          {"strict", r.strict()}};
    }
    return out;
}

template <class T>
T get_field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

Dataset parse_dataset(CsvTable table, const ColumnNames& cols) {
    auto require = [&](const std::string& name) {
        auto c = table.column(name);
        if (!c) throw InputError("missing required column '" + name + "'");
        return *c;
    };
    const std::size_t id_col = require(cols.id);
    const std::size_t score_col = require(cols.score);
    const std::size_t group_col = require(cols.group);
    std::optional<std::size_t> label_col = table.column(cols.label);
    if (!label_col && cols.label_required) {
        throw InputError("missing label column '" + cols.label + "'");
    }

    Dataset ds;
    ds.has_labels = label_col.has_value();
    ds.records.reserve(table.rows.size());
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        ScoreRecord r;
        r.id = row[id_col];
        if (!ids.insert(r.id).second) {
            throw InputError(where(table, i) + ": duplicate id '" + r.id + "'");
        }
        const auto score = parse_real(row[score_col]);
        if (!score || !(*score >= 0.0 && *score <= 1.0)) {
            throw InputError(where(table, i) + ": column '" + cols.score +
                             "' must be a number in [0,1], got '" + row[score_col] + "'");
        }
        r.score = *score;
        r.group = row[group_col];
        if (r.group.empty()) {
            throw InputError(where(table, i) + ": empty value in column '" + cols.group + "'");
        }
        if (label_col) {
            const auto& cell = row[*label_col];
            if (cell == "0" || cell == "1") {
                r.label = cell == "1" ? 1 : 0;
            } else if (!cell.empty()) {
                throw InputError(where(table, i) + ": column '" + cols.label +
                                 "' must be 0 or 1, got '" + cell + "'");
            }
        }
        ds.records.push_back(std::move(r));
    }
    ds.table = std::move(table);
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const ColumnNames& cols) {
    try {
        return parse_dataset(read_csv(path), cols);
    } catch (const InputError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path.string(), 0) == 0) throw;
        throw InputError(path.string() + ": " + msg);
    }
}

json calibrator_to_json(const FairCalibrator& c) {
    json groups = json::array();
    for (const auto& g : c.groups()) {
        json scores = json::array();
        for (double x : g.sample().values()) scores.push_back(x);
        groups.push_back(json{{"label", g.label()},
                              {"weight", g.weight()},
                              {"count", g.count()},
                              {"sorted_scores", std::move(scores)}});
    }
    json jitter = nullptr;
    if (c.jitter()) jitter = json{{"epsilon", c.jitter()->epsilon}, {"seed", c.jitter()->seed}};
    return json{{"format_version", kCalibratorFormatVersion},
                {"groups", std::move(groups)},
                {"jitter", std::move(jitter)}};
}

FairCalibrator calibrator_from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("calibrator document must be a JSON object");
    const int version = get_field<int>(doc, "format_version");
    if (version != kCalibratorFormatVersion) {
        throw InputError("unsupported calibrator format_version " + std::to_string(version) +
                         " (expected " + std::to_string(kCalibratorFormatVersion) + ")");
    }
    const json& groups_doc = doc.at("groups");
    if (!groups_doc.is_array() || groups_doc.empty()) {
        throw InputError("calibrator must list at least one group");
    }
    std::vector<GroupDistribution> groups;
    for (const auto& g : groups_doc) {
        const auto label = get_field<std::string>(g, "label");
        const auto weight = get_field<double>(g, "weight");
        const auto count = get_field<std::size_t>(g, "count");
        auto scores = get_field<std::vector<double>>(g, "sorted_scores");
        if (scores.size() != count) {
            throw InputError("group '" + label + "': count " + std::to_string(count) +
                             " does not match " + std::to_string(scores.size()) + " stored scores");
        }
        groups.emplace_back(label, Sample::from_sorted(std::move(scores)), weight);
    }
    std::optional<JitterConfig> jitter;
    if (doc.contains("jitter") && !doc.at("jitter").is_null()) {
        const json& j = doc.at("jitter");
        jitter = JitterConfig{get_field<double>(j, "epsilon"), get_field<std::uint64_t>(j, "seed")};
    }
    FairCalibrator c = FairCalibrator::from_groups(std::move(groups), jitter);
    for (const auto& g : c.groups()) {
        const double expected = static_cast<double>(g.count()) / static_cast<double>(c.total_count());
        if (std::abs(g.weight() - expected) > 1e-12) {
            throw InputError("group '" + g.label() + "': weight does not equal count / total");
        }
    }
    return c;
}

void save_calibrator(const FairCalibrator& c, const std::filesystem::path& path) {
    atomic_write(path, dump(calibrator_to_json(c)));
}

FairCalibrator load_calibrator(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        return calibrator_from_json(doc);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": malformed calibrator: " + e.what());
    }
}

json to_json(const AuditMetrics& m) {
    json pairs = json::array();
    for (const auto& [key, ks] : m.pairwise_ks) {
        pairs.push_back(json{{"groups", {key.first, key.second}}, {"ks", ks}});
    }
    json w2 = json::object();
    for (const auto& [label, d] : m.w2) w2[label] = d;
    json counts = json::object();
    for (const auto& [label, n] : m.counts) counts[label] = n;
    return json{{"unfairness", optional_number(m.unfairness)},
                {"pairwise_ks", std::move(pairs)},
                {"auc", optional_number(m.auc)},
                {"risk", optional_number(m.risk)},
                {"accuracy", optional_number(m.accuracy)},
                {"w2", std::move(w2)},
                {"counts", std::move(counts)}};
}

json to_json(const AuditReport& r, bool include_timing) {
    json doc = {{"format_version", kReportFormatVersion}};
    doc.update(to_json(r.before));
    doc["threshold"] = r.threshold;
    doc["after"] = r.after ? to_json(*r.after) : json(nullptr);
    doc["warnings"] = r.warnings;
    doc["meta"] = json{{"timing_ms", include_timing ? optional_number(r.timing_ms) : json(nullptr)}};
    return doc;
}

json to_json(const ExperimentResult& r, bool include_timing) {
    json runs = json::array();
    for (const auto& run : r.runs) {
        runs.push_back(json{{"seed", run.seed},
                            {"calib_size", run.calib_size},
                            {"test_size", run.test_size},
                            {"pre", to_json(run.pre_test)},
                            {"post", to_json(run.post_test)},
                            {"pre_calib_unfairness", run.pre_calib_unfairness},
                            {"post_calib_unfairness", run.post_calib_unfairness},
                            {"calib_floor", run.calib_floor},
                            {"calib_ranks", ranks_json(run.calib_ranks)},
                            {"test_ranks", ranks_json(run.test_ranks)},
                            {"prop1_residual", optional_number(run.prop1_residual)},
                            {"timing_ms", include_timing ? json(run.elapsed_ms) : json(nullptr)}});
    }
    return json{
        {"format_version", kReportFormatVersion},
        {"repetitions", r.runs.size()},
        {"summary",
         {{"pre_unfairness", mean_sd_json(r.pre_unfairness)},
          {"post_unfairness", mean_sd_json(r.post_unfairness)},
          {"pre_calib_unfairness", mean_sd_json(r.pre_calib_unfairness)},
          {"post_calib_unfairness", mean_sd_json(r.post_calib_unfairness)},
          {"pre_auc", optional_mean_sd(r.pre_auc)},
          {"post_auc", optional_mean_sd(r.post_auc)},
          {"pre_risk", optional_mean_sd(r.pre_risk)},
          {"post_risk", optional_mean_sd(r.post_risk)},
          {"max_prop1_residual", optional_number(r.max_prop1_residual)},
          {"calib_floor_respected", r.calib_floor_respected},
          {"ranks_preserved", r.ranks_preserved}}},
        {"runs", std::move(runs)},
        {"meta", {{"timing_ms", include_timing ? mean_sd_json(r.elapsed_ms) : json(nullptr)}}}};
}

json to_json(const SynthSpec& spec) {
    json groups = json::array();
    for (const auto& g : spec.groups) {
        json entry = {{"label", g.label}};
        if (const auto* beta = std::get_if<BetaLaw>(&g.law)) {
            entry["family"] = "beta";
            entry["a"] = beta->a;
            entry["b"] = beta->b;
        } else {
            const auto& tg = std::get<TruncatedGaussianLaw>(g.law);
            entry["family"] = "truncated_gaussian";
            entry["mu"] = tg.mu;
            entry["sigma"] = tg.sigma;
        }
        entry["size"] = g.size;
        groups.push_back(std::move(entry));
    }
    return json{{"seed", spec.seed}, {"labels", spec.labels}, {"groups", std::move(groups)}};
}

SynthSpec synth_spec_from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("synthetic spec must be a JSON object");
    SynthSpec spec;
    if (doc.contains("seed")) spec.seed = get_field<std::uint64_t>(doc, "seed");
    if (doc.contains("labels")) spec.labels = get_field<bool>(doc, "labels");
    if (!doc.contains("groups") || !doc.at("groups").is_array()) {
        throw InputError("synthetic spec needs a 'groups' array");
    }
    for (const auto& g : doc.at("groups")) {
        GroupSpec gs;
        gs.label = get_field<std::string>(g, "label");
        gs.size = get_field<std::size_t>(g, "size");
        const auto family = get_field<std::string>(g, "family");
        if (family == "beta") {
            gs.law = BetaLaw{get_field<double>(g, "a"), get_field<double>(g, "b")};
        } else if (family == "truncated_gaussian" || family == "gauss") {
            gs.law = TruncatedGaussianLaw{get_field<double>(g, "mu"), get_field<double>(g, "sigma")};
        } else {
            throw InputError("unknown distribution family '" + family + "'");
        }
        spec.groups.push_back(std::move(gs));
    }
    return spec;
}

GroupSpec parse_group_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 5) {
        throw InputError("group spec '" + text + "' must look like LABEL:beta:A:B:SIZE or LABEL:gauss:MU:SIGMA:SIZE");
    }
    auto number = [&](const std::string& s) {
        auto v = parse_real(s);
        if (!v) throw InputError("group spec '" + text + "': '" + s + "' is not a number");
        return *v;
    };
    GroupSpec gs;
    gs.label = parts[0];
    const double p1 = number(parts[2]);
    const double p2 = number(parts[3]);
    const double size = number(parts[4]);
    if (!(size >= 0.0) || size != std::floor(size) || size > 1e12) {
        throw InputError("group spec '" + text + "': size must be a non-negative integer");
    }
    gs.size = static_cast<std::size_t>(size);
    if (parts[1] == "beta") {
        gs.law = BetaLaw{p1, p2};
    } else if (parts[1] == "gauss" || parts[1] == "truncated_gaussian") {
        gs.law = TruncatedGaussianLaw{p1, p2};
    } else {
        throw InputError("group spec '" + text + "': unknown family '" + parts[1] + "'");
    }
    return gs;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace fairport
