#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "recasm/concurrency.hpp"
#include "recasm/parser.hpp"
#include "recasm/printer.hpp"
#include "recasm/runtime.hpp"

namespace recasm::cli {

namespace {

struct RunOptions {
  std::string program;
  std::string input = "{}";
  std::string policy = "synchronous";
  std::uint64_t seed = 0;
  std::size_t max_steps = 10000;
  std::string on_inconsistency = "halt";
  std::size_t max_read_lag = 0;
  std::string trace_path;
  std::string state_path;
  bool expect_quiescent = false;
};

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("RECASM_SEED"); env && *env) return std::stoull(env);
  return seed;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::map<std::string, Value> parse_inputs(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw SpecError("--input must be a JSON object");
  std::map<std::string, Value> out;
  for (const auto& [k, v] : j.items()) out.emplace(k, value_from_json(v));
  return out;
}

json run_summary(const Engine& e) {
  const Program& p = e.program();
  json outputs = json::object();
  if (!p.is_static()) {
    const RuleDecl& main = p.rule(p.main);
    if (!main.output.empty()) {
      outputs[main.output] = to_json(e.state().lookup(Location{AgentId{0}, main.output, {}}));
    }
  }
  json streams = json::object();
  for (const auto& f : p.observe) streams[f] = json::array();
  for (const auto& o : e.observations()) streams[o.loc.symbol].push_back(to_json(o.value));
  for (const auto& f : p.observe) {
    const SymbolInfo* info = p.signature->find(f);
    if (info && info->shared && info->arity == 0) outputs[f] = to_json(e.state().lookup(Location{std::nullopt, f, {}}));
  }
  json s{{"format", kFormatVersion},
         {"kind", "run-summary"},
         {"status", to_string(e.status())},
         {"steps", e.trace().steps.size()},
         {"agents_created", e.registry().agents().size()},
         {"outputs", std::move(outputs)},
         {"streams", std::move(streams)}};
  if (!e.run().halt_reason.empty()) s["halt_reason"] = e.run().halt_reason;
  return s;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Program p;
  try {
    p = parse_file(o.program);
  } catch (const ParseFailure& e) {
    err << e.format(o.program);
    return failure;
  }
  EngineConfig cfg;
  cfg.policy = SchedulerPolicy::parse(o.policy);
  cfg.seed = effective_seed(o.seed);
  cfg.max_read_lag = o.max_read_lag;
  if (o.on_inconsistency == "halt") {
    cfg.on_inconsistency = InconsistencyPolicy::halt;
  } else if (o.on_inconsistency == "skip") {
    cfg.on_inconsistency = InconsistencyPolicy::skip;
  } else {
    err << "unknown --on-inconsistency '" << o.on_inconsistency << "' (halt or skip)\n";
    return failure;
  }
  Engine e(std::move(p), cfg, parse_inputs(o.input));
  RunStatus st = e.run_to_quiescence(o.max_steps);
  if (!o.trace_path.empty()) write_file(o.trace_path, trace_to_jsonl(e.trace()));
  if (!o.state_path.empty()) {
    json s{{"format", kFormatVersion}, {"kind", "state"}, {"state", to_json(e.state())}};
    write_file(o.state_path, s.dump(2) + "\n");
  }
  out << run_summary(e).dump(2) << '\n';
  if (st == RunStatus::halted && !e.run().clashes.empty()) {
    err << "halted: inconsistent update set at";
    for (const auto& l : e.run().clashes) err << ' ' << l.to_string();
    err << '\n';
    return inconsistent_halt;
  }
  if (st != RunStatus::quiescent && o.expect_quiescent) {
    err << "step budget of " << o.max_steps << " spent without reaching quiescence\n";
    return budget_exhausted;
  }
  return ok;
}

int cmd_transform(const std::string& kind, const std::string& in, const std::string& outp, std::ostream& err) {
  Program p;
  try {
    p = parse_file(in);
  } catch (const ParseFailure& e) {
    err << e.format(in);
    return failure;
  }
  Program t;
  try {
    if (kind == "wrap") {
      t = wrap_recursive_as_concurrent(p);
    } else if (kind == "delegate") {
      t = delegate_transform(p);
    } else if (kind == "flatten") {
      t = flatten_static(p);
    } else {
      err << "unknown transform '" << kind << "' (wrap, delegate or flatten)\n";
      return failure;
    }
  } catch (const TransformError& e) {
    err << in << ": " << kind << ": " << e.what() << '\n';
    return failure;
  }
  write_file(outp, pretty_print(t));
  return ok;
}

struct CheckOptions {
  std::string trace;
  std::string program;
  bool postulates = false;
  bool po_run = false;
  std::string coherence = "exhaustive";
  std::uint64_t seed = 0;
  std::string report;
};

int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  Trace trace;
  try {
    trace = read_trace_file(o.trace);
  } catch (const TraceFormatError& e) {
    err << o.trace << ": malformed trace: " << e.what() << '\n';
    return failure;
  }
  bool postulates = o.postulates || !o.po_run;
  bool po_run = o.po_run || (!o.postulates && !o.program.empty());
  json report{{"format", kFormatVersion}, {"kind", "check"}, {"trace", o.trace}};
  bool pass = true;
  if (postulates) {
    AssertionReport r = assert_postulates(trace);
    pass = pass && r.ok();
    report["postulates"] = to_json(r);
    for (const auto& v : r.violations) err << "step " << v.step << ": " << v.kind << ": " << v.message << '\n';
  }
  if (po_run) {
    if (o.program.empty()) {
      err << "--po-run needs --program\n";
      return failure;
    }
    Program p;
    try {
      p = parse_file(o.program);
    } catch (const ParseFailure& e) {
      err << e.format(o.program);
      return failure;
    }
    if (program_hash(p) != trace.header.program_hash) {
      err << o.trace << ": trace was not produced by " << o.program << '\n';
      return failure;
    }
    PoCheckMode mode;
    try {
      mode = PoCheckMode::parse(o.coherence);
    } catch (const std::invalid_argument& e) {
      err << e.what() << '\n';
      return failure;
    }
    mode.seed = effective_seed(o.seed);
    PoRun run;
    try {
      run = extract_po_run(trace);
    } catch (const TraceFormatError& e) {
      err << o.trace << ": malformed trace: " << e.what() << '\n';
      return failure;
    }
    PoReport r = check_po_run(p, run, mode);
    pass = pass && r.pass();
    report["po_run"] = to_json(r);
    if (r.counterexample) err << "po-run: " << r.counterexample->condition << ": " << r.counterexample->message << '\n';
  }
  report["pass"] = pass;
  if (o.report.empty()) {
    out << report.dump(2) << '\n';
  } else {
    write_file(o.report, report.dump(2) + "\n");
  }
  return pass ? ok : check_violation;
}

int cmd_enumerate(const std::string& program, const std::string& input, std::size_t depth, std::size_t max_runs,
                  const std::string& outp, std::ostream& out, std::ostream& err) {
  Program p;
  try {
    p = parse_file(program);
  } catch (const ParseFailure& e) {
    err << e.format(program);
    return failure;
  }
  RunSet runs = enumerate_runs(p, parse_inputs(input), depth, max_runs);
  std::string text = to_json(runs).dump() + "\n";
  if (outp.empty()) {
    out << text;
  } else {
    write_file(outp, text);
  }
  return ok;
}

int cmd_export(const std::string& trace_path, const std::string& dot_path, const std::string& json_path,
               std::ostream& out, std::ostream& err) {
  PoRun run;
  try {
    run = extract_po_run(read_trace_file(trace_path));
  } catch (const TraceFormatError& e) {
    err << trace_path << ": malformed trace: " << e.what() << '\n';
    return failure;
  }
  std::string dot = export_dot(run);
  if (dot_path.empty()) {
    out << dot;
  } else {
    write_file(dot_path, dot);
  }
  if (!json_path.empty()) write_file(json_path, export_json(run).dump(2) + "\n");
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Executable recursive abstract state machines", "recasm"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "Run a program until quiescence or the step budget");
  run->add_option("program", ro.program, "Program file (.recasm)")->required();
  run->add_option("--input", ro.input, "Main inputs as a JSON object");
  run->add_option("--policy", ro.policy, "synchronous, interleaving or random-subset");
  run->add_option("--seed", ro.seed, "Scheduler seed (RECASM_SEED overrides)");
  run->add_option("--max-steps", ro.max_steps, "Step budget");
  run->add_option("--on-inconsistency", ro.on_inconsistency, "halt or skip");
  run->add_option("--max-read-lag", ro.max_read_lag, "Largest read lag for concurrent runs");
  run->add_option("--trace", ro.trace_path, "Write the JSON-lines trace here");
  run->add_option("--final-state", ro.state_path, "Write the final state as JSON here");
  run->add_flag("--expect-quiescent", ro.expect_quiescent, "Exit 3 if the budget runs out first");

  std::string tkind, tin, tout;
  auto* tr = app.add_subcommand("transform", "Transform a program");
  tr->add_option("kind", tkind, "wrap, delegate or flatten")->required();
  tr->add_option("input", tin, "Input program")->required();
  tr->add_option("output", tout, "Output program")->required();

  CheckOptions co;
  auto* ck = app.add_subcommand("check", "Check a recorded trace");
  ck->add_option("trace", co.trace, "Trace file")->required();
  ck->add_option("--program", co.program, "Program that produced the trace");
  ck->add_flag("--postulates", co.postulates, "Check the call-step discipline");
  ck->add_flag("--po-run", co.po_run, "Check the trace as a partial-order run");
  ck->add_option("--coherence", co.coherence, "exhaustive[:N] or sampled[:N]");
  ck->add_option("--seed", co.seed, "Seed for sampled coherence (RECASM_SEED overrides)");
  ck->add_option("--report", co.report, "Write the report here instead of stdout");

  std::string eprog, einput = "{}", eout;
  std::size_t depth = 5, max_runs = 1000000;
  auto* en = app.add_subcommand("enumerate", "Enumerate all runs up to a depth");
  en->add_option("program", eprog, "Program file")->required();
  en->add_option("--input", einput, "Inputs as a JSON object");
  en->add_option("--depth", depth, "Number of steps");
  en->add_option("--max-runs", max_runs, "Stop after this many runs");
  en->add_option("--out", eout, "Write the runs here instead of stdout");

  std::string xtrace, xdot, xjson;
  auto* ex = app.add_subcommand("export-dot", "Export the partial order of a trace");
  ex->add_option("trace", xtrace, "Trace file")->required();
  ex->add_option("--out", xdot, "DOT output path (default stdout)");
  ex->add_option("--json", xjson, "Also write the order as JSON here");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ok : failure;
  }

  try {
    if (*run) return cmd_run(ro, out, err);
    if (*tr) return cmd_transform(tkind, tin, tout, err);
    if (*ck) return cmd_check(co, out, err);
    if (*en) return cmd_enumerate(eprog, einput, depth, max_runs, eout, out, err);
    if (*ex) return cmd_export(xtrace, xdot, xjson, out, err);
  } catch (const json::exception& e) {
    err << "bad JSON: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return failure;
}

}  // namespace recasm::cli
