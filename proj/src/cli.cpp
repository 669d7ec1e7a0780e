#include "fairport/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"

#include "fairport/error.hpp"

namespace fairport {

namespace {

const std::filesystem::path& require_path(const std::optional<std::filesystem::path>& p,
                                          const char* flag) {
    if (!p) throw InputError(std::string("missing required option ") + flag);
    return *p;
}

void check_alpha(const RunConfig& cfg) {
    if (cfg.alpha && !(*cfg.alpha > 0.0 && *cfg.alpha < 1.0)) {
        throw InputError("--alpha must lie in (0,1), got " + format_real(*cfg.alpha));
    }
}

// Rejects records whose group the calibrator does not know, naming the line.
void check_groups(const FairCalibrator& c, const Dataset& ds) {
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto& r = ds.records[i];
        if (!c.find_group(r.group)) {
            throw UnknownGroupError("line " + std::to_string(ds.table.lines[i]) + ": unknown group '" +
                                    r.group + "' for record '" + r.id + "'");
        }
    }
}

bool has_within_group_ties(const FairCalibrator& c) {
    for (const auto& g : c.groups()) {
        const auto v = g.sample().values();
        if (std::adjacent_find(v.begin(), v.end()) != v.end()) return true;
    }
    return false;
}

std::optional<std::uint64_t> parse_seed(std::string_view text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

void print_metrics_table(std::ostream& out, const char* title, const AuditMetrics& m) {
    auto show = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("n/a"); };
    out << title << '\n';
    out << "  unfairness  " << show(m.unfairness) << '\n';
    for (const auto& [pair, ks] : m.pairwise_ks) {
        out << "  ks(" << pair.first << ", " << pair.second << ")  " << format_real(ks) << '\n';
    }
    out << "  auc         " << show(m.auc) << '\n';
    out << "  risk        " << show(m.risk) << '\n';
    out << "  accuracy    " << show(m.accuracy) << '\n';
    for (const auto& [label, n] : m.counts) {
        const auto w2 = m.w2.find(label);
        out << "  group " << label << ": n=" << n
            << " w2_to_barycenter=" << (w2 == m.w2.end() ? "n/a" : format_real(w2->second)) << '\n';
    }
}

}  // namespace

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    const Dataset ds = load_dataset(require_path(cfg.input, "--input"), cfg.columns);
    const auto& dest = require_path(cfg.calibrator, "--calibrator");
    std::optional<JitterConfig> jitter;
    if (cfg.jitter_eps) jitter = JitterConfig{*cfg.jitter_eps, cfg.seed};
    const FairCalibrator c = FairCalibrator::fit(ds.records, jitter, cfg.declared_groups);
    save_calibrator(c, dest);
    out << "fitted " << c.groups().size() << " group(s) on " << c.total_count() << " records\n";
    for (const auto& g : c.groups()) {
        out << "  " << g.label() << ": count=" << g.count() << " weight=" << format_real(g.weight()) << '\n';
    }
    return kExitOk;
}

int cmd_transform(const RunConfig& cfg, std::ostream& out) {
    const Dataset ds = load_dataset(require_path(cfg.input, "--input"), cfg.columns);
    const FairCalibrator c = load_calibrator(require_path(cfg.calibrator, "--calibrator"));
    const auto& dest = require_path(cfg.output, "--output");
    if (ds.table.column("fair_score")) {
        throw InputError("input already has a 'fair_score' column");
    }
    check_groups(c, ds);

    std::string text;
    auto header = ds.table.header;
    header.push_back("fair_score");
    append_csv_row(text, header);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        auto cells = ds.table.rows[i];
        cells.push_back(format_real(c.transform(ds.records[i].score, ds.records[i].group)));
        append_csv_row(text, cells);
    }
    atomic_write(dest, text);
    out << "wrote " << ds.records.size() << " rows to " << dest.string() << '\n';
    return kExitOk;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(require_path(cfg.input, "--input"), cfg.columns);
    AuditReport report;
    report.threshold = cfg.threshold;
    report.before = audit_metrics(ds.records, cfg.threshold);
    if (report.before.counts.size() < 2) {
        report.warnings.push_back("fewer than two groups present: unfairness is undefined");
    }

    if (!ds.records.empty()) {
        std::optional<FairCalibrator> loaded;
        if (cfg.calibrator) {
            loaded = load_calibrator(*cfg.calibrator);
            check_groups(*loaded, ds);
        }
        const auto t0 = std::chrono::steady_clock::now();
        const FairCalibrator c = loaded ? *loaded : FairCalibrator::fit(ds.records);
        std::vector<ScoreRecord> fair = ds.records;
        for (auto& r : fair) r.score = c.transform(r.score, r.group);
        const auto t1 = std::chrono::steady_clock::now();
        report.timing_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        report.after = audit_metrics(fair, cfg.threshold);

        // Self-fitted, tie-free pools must land under the discretization floor.
        if (!loaded && report.after->unfairness && !has_within_group_ties(c)) {
            double floor = 0.0;
            for (const auto& g : c.groups()) floor = std::max(floor, 1.0 / static_cast<double>(g.count()));
            if (*report.after->unfairness > floor + 1e-12) {
                throw InvariantError("post-projection unfairness " + format_real(*report.after->unfairness) +
                                     " exceeds the floor " + format_real(floor));
            }
        }
    } else {
        report.warnings.push_back("input has no records");
    }

    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    const auto doc = to_json(report, cfg.timing);
    if (cfg.report) {
        atomic_write(*cfg.report, dump(doc));
        print_metrics_table(out, "before projection", report.before);
        if (report.after) print_metrics_table(out, "after projection", *report.after);
        if (report.timing_ms && cfg.timing) {
            out << "fit+transform time: " << std::fixed << std::setprecision(3) << *report.timing_ms
                << " ms\n";
            out.unsetf(std::ios::floatfield);
        }
    } else {
        out << dump(doc);
    }
    return kExitOk;
}

int cmd_bias_labels(const RunConfig& cfg, std::ostream& out) {
    check_alpha(cfg);
    const Dataset ds = load_dataset(require_path(cfg.input, "--input"), cfg.columns);
    const auto& dest = require_path(cfg.output, "--output");
    const bool self_fit = !cfg.calibrator;
    const FairCalibrator c = self_fit ? FairCalibrator::fit(ds.records) : load_calibrator(*cfg.calibrator);
    check_groups(c, ds);

    auto bias = compute_db(c, ds.records);
    if (self_fit && c.groups().size() == 2) {
        const double residual = check_prop1(c, ds.records);
        if (residual > 1e-12) {
            throw InvariantError("two-group bias identity residual " + format_real(residual) + " exceeds 1e-12");
        }
    }
    const TaskConfig task{cfg.task, cfg.alpha.value_or(0.75)};
    const LabelingResult labeled = label_tasks(std::move(bias), task);
    export_task_dataset(labeled.records, dest);

    out << "task=" << to_string(task.kind);
    if (labeled.tau) out << " alpha=" << format_real(task.alpha) << " tau=" << format_real(*labeled.tau);
    out << " positives=" << labeled.positives << "/" << labeled.records.size()
        << " fraction=" << format_real(labeled.positive_fraction()) << '\n';
    return kExitOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    SynthSpec spec;
    if (cfg.synth_config) {
        try {
            spec = synth_spec_from_json(nlohmann::ordered_json::parse(read_file(*cfg.synth_config)));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(cfg.synth_config->string() + ": " + e.what());
        }
    }
    for (const auto& text : cfg.group_specs) spec.groups.push_back(parse_group_spec(text));
    if (!cfg.labels) spec.labels = false;
    if (cfg.seed_given) spec.seed = cfg.seed;
    validate(spec);
    if (!cfg.output && !cfg.report) {
        throw InputError("synth needs --output and/or --report");
    }

    if (cfg.output) {
        const auto records = generate(spec);
        std::string text;
        std::vector<std::string> header{"id", "score", "group"};
        if (spec.labels) header.push_back("label");
        append_csv_row(text, header);
        for (const auto& r : records) {
            std::vector<std::string> row{r.id, format_real(r.score), r.group};
            if (r.label) row.push_back(std::to_string(*r.label));
            append_csv_row(text, row);
        }
        atomic_write(*cfg.output, text);
        out << "wrote " << records.size() << " records to " << cfg.output->string() << '\n';
    }
    if (cfg.report) {
        const auto result = run_experiment(spec, cfg.split, cfg.repetitions);
        atomic_write(*cfg.report, dump(to_json(result, cfg.timing)));
        out << "repetitions=" << result.runs.size()
            << " pre_unfairness=" << format_real(result.pre_unfairness.mean)
            << " post_unfairness=" << format_real(result.post_unfairness.mean)
            << " post_calib_unfairness=" << format_real(result.post_calib_unfairness.mean) << '\n';
        if (!result.calib_floor_respected || !result.ranks_preserved ||
            (result.max_prop1_residual && *result.max_prop1_residual > 1e-12)) {
            throw InvariantError("experiment invariants violated; see " + cfg.report->string());
        }
    }
    return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fairness projection of classifier scores onto the Wasserstein barycenter", "fairport"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string task = "discrimination";
    std::optional<std::uint64_t> seed;

    auto add_dataset = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "Scored CSV (columns id, score, group[, label])");
        sub->add_option("--id-col", cfg.columns.id, "Id column name");
        sub->add_option("--score-col", cfg.columns.score, "Score column name");
        sub->add_option("--group-col", cfg.columns.group, "Group column name");
        sub->add_option("--label-col", cfg.columns.label, "Label column name")
            ->each([&](const std::string&) { cfg.columns.label_required = true; });
    };

    auto* fit = app.add_subcommand("fit", "Fit a calibrator on an unlabeled pool");
    add_dataset(fit);
    fit->add_option("--calibrator", cfg.calibrator, "Output calibrator JSON");
    fit->add_option("--groups", cfg.declared_groups, "Declared group labels")->delimiter(',');
    fit->add_option("--jitter-eps", cfg.jitter_eps, "Break ties with uniform noise of this half-width");
    fit->add_option("--seed", seed, "Jitter seed");

    auto* transform = app.add_subcommand("transform", "Append fair scores to a scored CSV");
    add_dataset(transform);
    transform->add_option("--calibrator", cfg.calibrator, "Calibrator JSON");
    transform->add_option("--output", cfg.output, "Output CSV");

    auto* audit = app.add_subcommand("audit", "Report unfairness and accuracy before/after projection");
    add_dataset(audit);
    audit->add_option("--calibrator", cfg.calibrator, "Calibrator JSON (default: fit on the input)");
    audit->add_option("--report", cfg.report, "Write the JSON report here and print a table");
    audit->add_option("--threshold", cfg.threshold, "Hard-classifier threshold");
    audit->add_flag("!--no-timing", cfg.timing, "Write meta.timing_ms as null");

    auto* bias = app.add_subcommand("bias-labels", "Generate a bias-detection task dataset");
    add_dataset(bias);
    bias->add_option("--calibrator", cfg.calibrator, "Calibrator JSON (default: fit on the input)");
    bias->add_option("--output", cfg.output, "Output task CSV");
    bias->add_option("--task", task, "discrimination | bias-size | outliers");
    bias->add_option("--alpha", cfg.alpha, "Quantile level for tau, in (0,1)");

    auto* synth = app.add_subcommand("synth", "Generate synthetic biased scores and run the experiment");
    synth->add_option("--config", cfg.synth_config, "JSON synthetic spec");
    synth->add_option("--group", cfg.group_specs, "LABEL:beta:A:B:SIZE or LABEL:gauss:MU:SIGMA:SIZE");
    synth->add_flag("!--no-labels", cfg.labels, "Omit Bernoulli(score) labels");
    synth->add_option("--seed", seed, "Master seed");
    synth->add_option("--output", cfg.output, "Generated CSV");
    synth->add_option("--report", cfg.report, "Experiment result JSON");
    synth->add_option("--repetitions", cfg.repetitions, "Experiment repetitions");
    synth->add_option("--calib-frac", cfg.split.calib_fraction, "Calibration fraction per group");
    synth->add_option("--test-frac", cfg.split.test_fraction, "Test fraction per group");
    synth->add_flag("!--no-timing", cfg.timing, "Write timings as null");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (seed) {
            cfg.seed = *seed;
            cfg.seed_given = true;
        }
        if (const char* env = std::getenv("FAIRPORT_SEED"); env && *env) {
            const auto parsed = parse_seed(env);
            if (!parsed) throw InputError(std::string("FAIRPORT_SEED is not an unsigned integer: ") + env);
            cfg.seed = *parsed;
            cfg.seed_given = true;
        }
        cfg.task = parse_task_kind(task);

        if (fit->parsed()) return cmd_fit(cfg, out);
        if (transform->parsed()) return cmd_transform(cfg, out);
        if (audit->parsed()) return cmd_audit(cfg, out, err);
        if (bias->parsed()) return cmd_bias_labels(cfg, out);
        return cmd_synth(cfg, out);
    } catch (const InvariantError& e) {
        err << "fairport: invariant violated: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const InputError& e) {
        err << "fairport: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "fairport: internal error: " << e.what() << '\n';
        return kExitInvariant;
    }
}

}  // namespace fairport
