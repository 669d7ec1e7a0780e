#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fairport/bias_detect.hpp"
#include "fairport/cli.hpp"
#include "fairport/error.hpp"
#include "fairport/fair_projection.hpp"
#include "fairport/io.hpp"
#include "fairport/metrics.hpp"
#include "fairport/synth_bench.hpp"

namespace py = pybind11;
using namespace fairport;

namespace {

std::vector<ScoreRecord> make_records(const std::vector<double>& scores,
                                      const std::vector<std::string>& groups) {
    if (scores.size() != groups.size()) {
        throw InputError("scores and groups must have the same length");
    }
    std::vector<ScoreRecord> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i].id = std::to_string(i);
        out[i].score = scores[i];
        out[i].group = groups[i];
    }
    return out;
}

std::vector<ScoreLabel> make_labeled(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw InputError("scores and labels must have the same length");
    }
    std::vector<ScoreLabel> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {scores[i], labels[i]};
    return out;
}

py::object json_to_py(const nlohmann::ordered_json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

}  // namespace

PYBIND11_MODULE(_fairport, m) {
    m.doc() = "Wasserstein-barycenter fairness projection of classifier scores";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

    m.def("cdf", [](std::vector<double> values, double u) {
        return StepCdf(Sample::from_unsorted(std::move(values)))(u);
    }, py::arg("values"), py::arg("u"));
    m.def("quantile", [](std::vector<double> values, double v) {
        return StepQuantile(Sample::from_unsorted(std::move(values)))(v);
    }, py::arg("values"), py::arg("v"));
    m.def("jitter", [](std::vector<double> values, double epsilon, std::uint64_t seed) {
        const auto s = jitter(Sample::from_unsorted(std::move(values)), epsilon, seed);
        return std::vector<double>(s.values().begin(), s.values().end());
    }, py::arg("values"), py::arg("epsilon"), py::arg("seed"));

    py::class_<FairCalibrator>(m, "FairCalibrator")
        .def_static("fit", [](const std::vector<double>& scores, const std::vector<std::string>& groups,
                              std::optional<double> jitter_eps, std::uint64_t seed) {
            std::optional<JitterConfig> jitter;
            if (jitter_eps) jitter = JitterConfig{*jitter_eps, seed};
            return FairCalibrator::fit(make_records(scores, groups), jitter);
        }, py::arg("scores"), py::arg("groups"), py::arg("jitter_eps") = py::none(), py::arg("seed") = 0)
        .def_static("from_json", [](const std::string& text) {
            return calibrator_from_json(nlohmann::ordered_json::parse(text));
        })
        .def_static("load", [](const std::string& path) { return load_calibrator(path); })
        .def("to_json", [](const FairCalibrator& c) { return dump(calibrator_to_json(c)); })
        .def("save", [](const FairCalibrator& c, const std::string& path) { save_calibrator(c, path); })
        .def("transform", &FairCalibrator::transform, py::arg("score"), py::arg("group"))
        .def("transform_many", [](const FairCalibrator& c, const std::vector<double>& scores,
                                  const std::vector<std::string>& groups) {
            std::vector<double> out;
            for (const auto& [id, fair] : c.transform_batch(make_records(scores, groups))) out.push_back(fair);
            return out;
        }, py::arg("scores"), py::arg("groups"))
        .def("barycenter_quantile", &FairCalibrator::barycenter_quantile, py::arg("v"))
        .def_property_readonly("groups", [](const FairCalibrator& c) {
            std::vector<std::string> out;
            for (const auto& g : c.groups()) out.push_back(g.label());
            return out;
        })
        .def_property_readonly("weights", [](const FairCalibrator& c) {
            std::map<std::string, double> out;
            for (const auto& g : c.groups()) out[g.label()] = g.weight();
            return out;
        })
        .def_property_readonly("counts", [](const FairCalibrator& c) {
            std::map<std::string, std::size_t> out;
            for (const auto& g : c.groups()) out[g.label()] = g.count();
            return out;
        });

    m.def("ks_two_sample", [](const std::vector<double>& a, const std::vector<double>& b) {
        return ks_two_sample(a, b);
    });
    m.def("unfairness", [](const std::vector<double>& scores, const std::vector<std::string>& groups) {
        if (scores.size() != groups.size()) throw InputError("scores and groups must have the same length");
        std::vector<ScoreGroup> recs(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) recs[i] = {scores[i], groups[i]};
        const auto u = unfairness(recs);
        return py::make_tuple(u.unfairness, u.pairwise_ks);
    }, py::arg("scores"), py::arg("groups"));
    m.def("auc", [](const std::vector<double>& s, const std::vector<int>& y) { return auc(make_labeled(s, y)); });
    m.def("squared_risk", [](const std::vector<double>& s, const std::vector<int>& y) {
        return squared_risk(make_labeled(s, y));
    });
    m.def("hard_accuracy", [](const std::vector<double>& s, const std::vector<int>& y, double threshold) {
        return hard_accuracy(make_labeled(s, y), threshold);
    }, py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
    m.def("w2_distance", [](const std::vector<double>& a, const std::vector<double>& b) {
        return w2_distance(a, b);
    });

    m.def("compute_db", [](const FairCalibrator& c, const std::vector<double>& scores,
                           const std::vector<std::string>& groups) {
        std::vector<double> out;
        for (const auto& b : compute_db(c, make_records(scores, groups))) out.push_back(b.d_b);
        return out;
    }, py::arg("calibrator"), py::arg("scores"), py::arg("groups"));
    m.def("transport_counterfactual", &transport_counterfactual,
          py::arg("calibrator"), py::arg("score"), py::arg("group"));
    m.def("check_prop1", [](const FairCalibrator& c, const std::vector<double>& scores,
                            const std::vector<std::string>& groups) {
        return check_prop1(c, make_records(scores, groups));
    }, py::arg("calibrator"), py::arg("scores"), py::arg("groups"));
    m.def("label_tasks", [](const std::vector<double>& d_b, const std::string& task, double alpha) {
        std::vector<BiasRecord> recs(d_b.size());
        for (std::size_t i = 0; i < d_b.size(); ++i) recs[i].d_b = d_b[i];
        const auto res = label_tasks(std::move(recs), TaskConfig{parse_task_kind(task), alpha});
        std::vector<int> labels;
        for (const auto& r : res.records) labels.push_back(*r.label);
        return py::make_tuple(labels, res.tau);
    }, py::arg("d_b"), py::arg("task"), py::arg("alpha") = 0.75);
    m.def("decompose_bias", [](const FairCalibrator& c, double score_s, double score_other,
                               const std::string& group) {
        const auto d = decompose_bias(c, score_s, score_other, group);
        py::dict out;
        out["d_b"] = d.d_b;
        out["implicit"] = d.implicit_bias;
        out["explicit"] = d.explicit_bias;
        out["bound_ok"] = d.bound_ok;
        return out;
    }, py::arg("calibrator"), py::arg("score_s"), py::arg("score_other"), py::arg("group"));

    m.def("generate", [](const std::string& spec_json) {
        const auto recs = generate(synth_spec_from_json(nlohmann::ordered_json::parse(spec_json)));
        py::list out;
        for (const auto& r : recs) {
            out.append(py::make_tuple(r.id, r.score, r.group, r.label ? py::cast(*r.label) : py::none()));
        }
        return out;
    }, py::arg("spec_json"));
    m.def("run_experiment", [](const std::string& spec_json, double calib_fraction, double test_fraction,
                               std::size_t repetitions, bool include_timing) {
        const auto spec = synth_spec_from_json(nlohmann::ordered_json::parse(spec_json));
        const auto res = run_experiment(spec, SplitConfig{calib_fraction, test_fraction}, repetitions);
        return json_to_py(to_json(res, include_timing));
    }, py::arg("spec_json"), py::arg("calib_fraction") = 0.16, py::arg("test_fraction") = 0.20,
       py::arg("repetitions") = 10, py::arg("include_timing") = true);

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "fairport");
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
