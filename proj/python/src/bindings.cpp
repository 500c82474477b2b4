#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "recasm/concurrency.hpp"
#include "recasm/parser.hpp"
#include "recasm/printer.hpp"
#include "recasm/runtime.hpp"

namespace py = pybind11;
using namespace recasm;

namespace {

Program parse_or_raise(const std::string& source) {
  try {
    return parse(source);
  } catch (const ParseFailure& e) {
    throw py::value_error(e.format("<string>"));
  }
}

std::map<std::string, Value> inputs_of(const std::string& text) {
  json j = json::parse(text);
  std::map<std::string, Value> out;
  for (const auto& [k, v] : j.items()) out.emplace(k, value_from_json(v));
  return out;
}

class PyEngine {
 public:
  PyEngine(const std::string& source, const std::string& inputs, const std::string& policy, std::uint64_t seed,
           const std::string& on_inconsistency)
      : engine_(parse_or_raise(source),
                EngineConfig{SchedulerPolicy::parse(policy), seed,
                             on_inconsistency == "skip" ? InconsistencyPolicy::skip : InconsistencyPolicy::halt, 0},
                inputs_of(inputs)) {}

  std::string run(std::size_t max_steps) { return to_string(engine_.run_to_quiescence(max_steps)); }
  void step() { engine_.step(); }
  std::string status() const { return to_string(engine_.status()); }
  std::size_t steps() const { return engine_.trace().steps.size(); }
  std::string state_json() const { return to_json(engine_.state()).dump(); }
  std::string trace_jsonl() const { return trace_to_jsonl(engine_.trace()); }

  std::string output() const {
    const Program& p = engine_.program();
    if (p.is_static()) throw py::value_error("a static system has no main output");
    const RuleDecl& main = p.rule(p.main);
    return to_json(engine_.state().lookup(Location{AgentId{0}, main.output, {}})).dump();
  }

 private:
  Engine engine_;
};

std::string transform(const std::string& kind, const std::string& source) {
  Program p = parse_or_raise(source);
  try {
    if (kind == "wrap") return pretty_print(wrap_recursive_as_concurrent(p));
    if (kind == "delegate") return pretty_print(delegate_transform(p));
    if (kind == "flatten") return pretty_print(flatten_static(p));
  } catch (const TransformError& e) {
    throw py::value_error(e.what());
  }
  throw py::value_error("unknown transform '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_recasm, m) {
  m.doc() = "Recursive abstract state machine engine";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);

  m.def("format_program", [](const std::string& s) { return pretty_print(parse_or_raise(s)); });
  m.def("transform", &transform, py::arg("kind"), py::arg("source"));
  m.def(
      "enumerate_runs",
      [](const std::string& s, const std::string& inputs, std::size_t depth, std::size_t max_runs) {
        return to_json(enumerate_runs(parse_or_raise(s), inputs_of(inputs), depth, max_runs)).dump();
      },
      py::arg("source"), py::arg("inputs") = "{}", py::arg("depth") = 5, py::arg("max_runs") = 1000000);
  m.def("check_postulates", [](const std::string& jsonl) {
    std::istringstream in(jsonl);
    return to_json(assert_postulates(read_trace(in))).dump();
  });
  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });

  py::class_<PyEngine>(m, "Engine")
      .def(py::init<const std::string&, const std::string&, const std::string&, std::uint64_t, const std::string&>(),
           py::arg("source"), py::arg("inputs") = "{}", py::arg("policy") = "synchronous", py::arg("seed") = 0,
           py::arg("on_inconsistency") = "halt")
      .def("run", &PyEngine::run, py::arg("max_steps") = 10000)
      .def("step", &PyEngine::step)
      .def_property_readonly("status", &PyEngine::status)
      .def_property_readonly("steps", &PyEngine::steps)
      .def("state_json", &PyEngine::state_json)
      .def("trace_jsonl", &PyEngine::trace_jsonl)
      .def("output_json", &PyEngine::output);
}
