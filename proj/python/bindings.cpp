#include <supersched/analysis_metrics.hpp>
#include <supersched/generator.hpp>
#include <supersched/report.hpp>
#include <supersched/scenario_io.hpp>
#include <supersched/sim_engine.hpp>
#include <supersched/trace_io.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace supersched;

namespace {

py::dict event_dict(const TraceEvent& e) {
    py::dict d;
    d["t"] = e.tick;
    d["proc"] = e.proc == kNoProc ? py::object(py::none()) : py::object(py::int_(e.proc));
    d["kind"] = std::string(to_string(e.kind));
    d["id"] = e.job ? py::object(py::str(e.job->str())) : py::object(py::none());
    d["detail"] = e.detail;
    return d;
}

py::dict metrics_dict(const Trace& trace) {
    const auto m = compute_metrics(trace);
    py::dict d;
    d["jobs"] = m.n_total;
    d["misses"] = m.miss_n;
    d["waited"] = m.waited_tx;
    d["miss_rate"] = miss_rate(trace);
    d["guarantee_ratio"] = m.guarantee_ratio;
    d["success_before"] = m.success_before_x;
    d["success_after"] = m.success_after_y;
    if (m.n_total > 0) {
        const auto n = stability(m, StabilityForm::Normalized);
        const auto r = stability(m, StabilityForm::Raw);
        d["stability"] = py::make_tuple(n.value, n.stable);
        d["stability_raw"] = py::make_tuple(r.value, r.stable);
    } else {
        d["stability"] = py::none();
        d["stability_raw"] = py::none();
    }
    d["critical_met"] = critical_met(trace);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tick-driven real-time scheduling simulator";

    static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
    static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            std::string msg = e.what();
            for (const auto& i : e.issues()) msg += "\n  " + i;
            validation_error(msg.c_str());
        } catch (const ParseError& e) {
            parse_error(e.what());
        } catch (const ConfigError& e) {
            config_error(e.what());
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        }
    });

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("processors", &Scenario::processors)
        .def_readonly("notes", &Scenario::notes)
        .def_property_readonly("mode", [](const Scenario& s) { return std::string(to_string(s.mode)); })
        .def_property_readonly("n_tasks", [](const Scenario& s) { return s.taskset.size(); })
        .def_property_readonly("utilization", [](const Scenario& s) { return total_utilization(s.taskset); })
        .def_property_readonly("horizon", &effective_horizon)
        .def_property_readonly("tasks",
                               [](const Scenario& s) {
                                   py::list out;
                                   for (const auto& t : s.taskset.tasks) {
                                       out.append(py::make_tuple(t.id, t.wcet, t.period, t.deadline));
                                   }
                                   return out;
                               })
        .def("text", &format_scenario)
        .def("__repr__", [](const Scenario& s) {
            return "<Scenario " + s.name + ": " + std::to_string(s.taskset.size()) + " tasks on " +
                   std::to_string(s.processors) + " processors>";
        });

    py::class_<Trace>(m, "Trace")
        .def("__len__", &Trace::size)
        .def("events",
             [](const Trace& t) {
                 py::list out;
                 for (const auto& e : t) out.append(event_dict(e));
                 return out;
             })
        .def("jsonl", &trace_to_jsonl)
        .def("csv", &trace_to_csv)
        .def("gantt_csv", &gantt_csv)
        .def("metrics", &metrics_dict)
        .def("__eq__", [](const Trace& a, const Trace& b) { return a == b; });

    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("origin") = "<text>",
          "Parse scenario text; raises ParseError or ValidationError.");
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("run", &run, py::arg("scenario"), py::call_guard<py::gil_scoped_release>(),
          "Simulate to completion and return the trace.");
    m.def("parse_trace", &parse_trace_jsonl, py::arg("jsonl"));
    m.def(
        "report",
        [](const Scenario& sc, const Trace& tr, const std::string& format) {
            const auto r = make_report(sc, tr);
            if (format == "json") return report_json(r);
            if (format == "text") return report_text(r);
            throw std::invalid_argument("format must be 'text' or 'json'");
        },
        py::arg("scenario"), py::arg("trace"), py::arg("format") = "json");
    m.def(
        "analyze",
        [](const Scenario& sc) {
            py::list out;
            for (const auto& v : analyze(sc)) {
                py::dict d;
                d["proc"] = v.proc;
                d["tasks"] = v.n_tasks;
                d["utilization"] = v.utilization;
                d["rm"] = std::string(to_string(v.rm));
                d["edf"] = v.edf;
                out.append(d);
            }
            return out;
        },
        py::arg("scenario"));
    m.def(
        "generate",
        [](std::size_t n, double u, Tick period_min, Tick period_max, std::vector<Tick> periods, std::uint64_t seed,
           const std::string& name, std::uint32_t processors, const std::string& mode) {
            GeneratorSpec g;
            g.n = n;
            g.target_u = u;
            g.period_min = period_min;
            g.period_max = period_max;
            g.periods = std::move(periods);
            Scenario sc;
            sc.name = name;
            sc.seed = seed;
            sc.processors = processors;
            auto parsed = parse_sched_mode(mode);
            if (!parsed) throw std::invalid_argument("mode must be edf, rm or hybrid");
            sc.mode = *parsed;
            sc.taskset = generate_taskset(g, seed);
            return sc;
        },
        py::arg("n"), py::arg("u"), py::arg("period_min") = 10, py::arg("period_max") = 100,
        py::arg("periods") = std::vector<Tick>{}, py::arg("seed") = 0, py::arg("name") = "generated",
        py::arg("processors") = 1, py::arg("mode") = "edf");
    m.def("ll_bound", &ll_bound, py::arg("n"));
}
