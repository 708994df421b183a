#include "gsnassure/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "gsnassure/dsl.hpp"
#include "gsnassure/reporting.hpp"
#include "gsnassure/simulator.hpp"

namespace gsn {

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsageError = 2;

struct CliFailure {
  int exit_code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure{kUsageError, "cannot read file '" + path + "'"};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliFailure{kUsageError, "cannot write '" + tmp + "'"};
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CliFailure{kUsageError, "cannot replace '" + path + "'"};
}

ArgumentGraph parse_case_file(const std::string& path, std::ostream& err) {
  ParseResult result = parse(read_file(path));
  if (!result.ok()) {
    for (const ParseError& e : result.errors) err << path << ":" << to_text(e) << "\n";
    throw CliFailure{kUsageError, "parse failed: " + path};
  }
  return std::move(result.graph);
}

std::string now_iso8601() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  ArgumentGraph graph = parse_case_file(path, err);
  auto diagnostics = graph.validate();
  bool errors = false;
  for (const Diagnostic& d : diagnostics) {
    out << (d.severity == Severity::Error ? "error: " : "warning: ") << d.message;
    if (!d.node.empty()) out << " (" << d.node << ")";
    if (d.edge)
      out << " (" << d.edge->from << " " << edge_kind_name(d.edge->kind) << " " << d.edge->to
          << ")";
    out << "\n";
    errors = errors || d.severity == Severity::Error;
  }
  out << graph.name() << ": " << graph.node_count() << " nodes, " << graph.edge_count()
      << " edges, " << (errors ? "INVALID" : "ok") << "\n";
  return errors ? kDomainFailure : kOk;
}

int cmd_eval(const std::string& path, const std::string& explain_node, std::ostream& out,
             std::ostream& err) {
  ArgumentGraph graph = parse_case_file(path, err);
  StatusAssignment assignment = evaluate(graph);
  if (!explain_node.empty()) {
    out << to_text(explain(assignment, explain_node));
  } else {
    out << to_text(assignment);
  }
  // Exit 1 when the top claim is defeated.
  std::set<std::string> non_roots;
  for (const Edge& e : graph.edges())
    if (e.kind == EdgeKind::SupportedBy || e.kind == EdgeKind::MitigatedBy)
      non_roots.insert(e.to);
  for (const std::string& id : graph.sorted_ids()) {
    if (graph.node(id).kind != NodeKind::Goal || non_roots.count(id)) continue;
    if (assignment.status_of(id) == Status::Defeated) return kDomainFailure;
    break;
  }
  return kOk;
}

int cmd_dot(const std::string& path, const std::string& output, std::ostream& out,
            std::ostream& err) {
  ArgumentGraph graph = parse_case_file(path, err);
  std::string dot = export_dot(graph, evaluate(graph));
  if (output.empty()) out << dot;
  else write_file_atomic(output, dot);
  return kOk;
}

int cmd_gaps(const std::string& path, const std::string& registry_path, std::ostream& out,
             std::ostream& err) {
  ArgumentGraph graph = parse_case_file(path, err);
  GuardrailRegistry registry = load_registry(registry_path);
  auto gaps = coverage_gaps(registry, graph);
  if (gaps.empty()) {
    out << "no coverage gaps\n";
    return kOk;
  }
  for (const CoverageGap& gap : gaps)
    out << gap.claim << ": " << attack_class_token(gap.missing) << " uncovered\n";
  return kDomainFailure;
}

int cmd_reconcile(const std::string& path, const std::string& registry_path, bool write,
                  std::ostream& out, std::ostream& err) {
  ArgumentGraph graph = parse_case_file(path, err);
  GuardrailRegistry registry = load_registry(registry_path);
  ReconcileResult result = reconcile_defeaters(registry, graph);
  if (result.changes.empty()) out << "no changes\n";
  else out << to_text(result.changes);
  for (const std::string& id : result.deprecation_candidates)
    out << "deprecation candidate: " << id << "\n";
  if (write && !result.changes.empty()) {
    apply(graph, result.changes);
    write_file_atomic(path, print(graph));
    out << "wrote " << path << "\n";
  }
  return kOk;
}

int cmd_incident_add(const std::string& ledger_path, const IncidentEvent& event,
                     std::ostream& out) {
  IncidentLedger ledger = load_ledger(ledger_path);
  std::uint64_t id = ledger.record_incident(event);
  append_ledger_line(ledger_path, incident_line(ledger.incident(id)));
  out << "incident #" << id << ": " << classification_token(classify_incident(event)) << "\n";
  return kOk;
}

int cmd_incident_list(const std::string& ledger_path, std::ostream& out) {
  IncidentLedger ledger = load_ledger(ledger_path);
  for (const IncidentRecord& r : ledger.incidents()) {
    out << "#" << r.id << " " << r.timestamp << " " << attack_class_token(r.attack_class) << " "
        << (r.blocked_at ? std::string("blocked@") + layer_token(*r.blocked_at) : "delivered")
        << " " << (r.unintended ? "unintended" : "intended") << " "
        << consequence_token(r.consequence) << " -> "
        << classification_token(classify_incident(r))
        << (ledger.reported(r.id) ? " [reported]" : "") << "\n";
  }
  out << ledger.size() << " event(s)\n";
  return kOk;
}

int cmd_incident_report(const std::string& ledger_path, std::uint64_t id,
                        const std::string& case_path, const std::string& output,
                        std::ostream& out, std::ostream& err) {
  IncidentLedger ledger = load_ledger(ledger_path);
  bool already_reported = ledger.size() >= 1 && id >= 1 && id <= ledger.size() &&
                          ledger.reported(id);
  std::string stamp = now_iso8601();
  std::string document;
  if (!case_path.empty()) {
    ArgumentGraph graph = parse_case_file(case_path, err);
    StatusAssignment assignment = evaluate(graph);
    document = generate_serious_report(ledger, id, &graph, &assignment, stamp);
  } else {
    document = generate_serious_report(ledger, id, nullptr, nullptr, stamp);
  }
  // Persist only the new report marker; incident rows are already on disk.
  if (!already_reported) append_ledger_line(ledger_path, report_marker_line(id, stamp));
  if (output.empty()) out << document;
  else write_file_atomic(output, document);
  return kOk;
}

int cmd_simulate(const std::string& config_path, const std::string& ingest_path,
                 std::ostream& out) {
  SimConfig config = load_sim_config(config_path);
  SimOutcome outcome = run_simulation(config);
  out << outcome.to_text(config);
  if (!ingest_path.empty()) {
    IncidentLedger ledger = load_ledger(ingest_path);
    for (const IncidentEvent& event : outcome.incidents) {
      std::uint64_t id = ledger.record_incident(event);
      append_ledger_line(ingest_path, incident_line(ledger.incident(id)));
    }
    out << "ingested " << outcome.incidents.size() << " incident(s) into " << ingest_path
        << "\n";
  }
  return kOk;
}

int cmd_report(const std::string& path, const std::string& registry_path,
               const std::string& ledger_path, std::ostream& out, std::ostream& err) {
  ArgumentGraph graph = parse_case_file(path, err);
  GuardrailRegistry registry = load_registry(registry_path);
  IncidentLedger ledger = load_ledger(ledger_path);
  ComplianceReport report = compliance_report(graph, evaluate(graph), registry, ledger);
  out << report.to_text();
  bool violated = std::any_of(report.duties.begin(), report.duties.end(),
                              [](const DutyEntry& d) { return d.status == DutyStatus::Violated; });
  return violated ? kDomainFailure : kOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GSN assurance cases for LLM adversarial robustness"};
  app.name("gsnassure");
  app.require_subcommand(1);

  std::string case_path, registry_path, ledger_path, config_path, output, explain_node;
  bool write_flag = false;

  auto* check = app.add_subcommand("check", "parse and validate a case file");
  check->add_option("file", case_path, "case file (.gsn)")->required();

  auto* eval_cmd = app.add_subcommand("eval", "print the status assignment");
  eval_cmd->add_option("file", case_path, "case file (.gsn)")->required();
  eval_cmd->add_option("--explain", explain_node, "print the cause tree for one node");

  auto* dot = app.add_subcommand("dot", "export a Graphviz diagram");
  dot->add_option("file", case_path, "case file (.gsn)")->required();
  dot->add_option("-o,--output", output, "output file (stdout when omitted)");

  auto* gaps = app.add_subcommand("gaps", "list coverage gaps");
  gaps->add_option("file", case_path, "case file (.gsn)")->required();
  gaps->add_option("--registry", registry_path, "guardrail registry file")->required();

  auto* reconcile = app.add_subcommand("reconcile", "sync auto-defeaters with coverage gaps");
  reconcile->add_option("file", case_path, "case file (.gsn)")->required();
  reconcile->add_option("--registry", registry_path, "guardrail registry file")->required();
  reconcile->add_flag("--write", write_flag, "apply changes and rewrite the case file");

  auto* incident = app.add_subcommand("incident", "ledger operations");
  incident->require_subcommand(1);

  std::string attack, blocked_at, consequence = "none", session, notes, timestamp;
  bool unintended = false, intended = false;
  auto* inc_add = incident->add_subcommand("add", "append an event");
  inc_add->add_option("--ledger", ledger_path, "ledger file")->required();
  inc_add->add_option("--class", attack, "attack class token")->required();
  inc_add->add_option("--blocked-at", blocked_at, "blocking layer L1..L5 (omit = delivered)");
  inc_add->add_flag("--unintended", unintended, "output was unintended");
  inc_add->add_flag("--intended", intended, "output was intended");
  inc_add->add_option("--consequence", consequence, "downstream consequence class");
  inc_add->add_option("--session", session, "session token for multi-turn grouping");
  inc_add->add_option("--notes", notes, "free text");
  inc_add->add_option("--timestamp", timestamp, "ISO-8601 override (default: now)");

  auto* inc_list = incident->add_subcommand("list", "print the ledger");
  inc_list->add_option("--ledger", ledger_path, "ledger file")->required();

  std::uint64_t incident_id = 0;
  auto* inc_report = incident->add_subcommand("report", "generate an Article 73 report");
  inc_report->add_option("id", incident_id, "incident id")->required();
  inc_report->add_option("--ledger", ledger_path, "ledger file")->required();
  inc_report->add_option("--case", case_path, "assurance case for claim context");
  inc_report->add_option("-o,--output", output, "output file (stdout when omitted)");

  auto* simulate = app.add_subcommand("simulate", "run the layered breach simulator");
  simulate->add_option("--config", config_path, "simulation config (JSON)")->required();
  simulate->add_option("--ingest", ledger_path, "append generated incidents to this ledger");

  auto* report = app.add_subcommand("report", "emit the compliance report");
  report->add_option("file", case_path, "case file (.gsn)")->required();
  report->add_option("--registry", registry_path, "guardrail registry file")->required();
  report->add_option("--ledger", ledger_path, "incident ledger file")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (check->parsed()) return cmd_check(case_path, out, err);
    if (eval_cmd->parsed()) return cmd_eval(case_path, explain_node, out, err);
    if (dot->parsed()) return cmd_dot(case_path, output, out, err);
    if (gaps->parsed()) return cmd_gaps(case_path, registry_path, out, err);
    if (reconcile->parsed())
      return cmd_reconcile(case_path, registry_path, write_flag, out, err);
    if (incident->parsed()) {
      if (inc_list->parsed()) return cmd_incident_list(ledger_path, out);
      if (inc_report->parsed())
        return cmd_incident_report(ledger_path, incident_id, case_path, output, out, err);
      if (inc_add->parsed()) {
        if (unintended == intended)
          throw CliFailure{kUsageError, "exactly one of --unintended/--intended is required"};
        IncidentEvent event;
        event.timestamp = timestamp.empty() ? now_iso8601() : timestamp;
        auto cls = attack_class_from_token(attack);
        if (!cls) throw CliFailure{kUsageError, "unknown attack class '" + attack + "'"};
        event.attack_class = *cls;
        if (!blocked_at.empty()) {
          auto layer = layer_from_token(blocked_at);
          if (!layer) throw CliFailure{kUsageError, "unknown layer '" + blocked_at + "'"};
          event.blocked_at = layer;
        }
        event.unintended = unintended;
        auto cons = consequence_from_token(consequence);
        if (!cons) throw CliFailure{kUsageError, "unknown consequence '" + consequence + "'"};
        event.consequence = *cons;
        if (!session.empty()) event.session = session;
        event.notes = notes;
        return cmd_incident_add(ledger_path, event, out);
      }
    }
    if (simulate->parsed()) return cmd_simulate(config_path, ledger_path, out);
    if (report->parsed()) return cmd_report(case_path, registry_path, ledger_path, out, err);
  } catch (const CliFailure& failure) {
    err << failure.message << "\n";
    return failure.exit_code;
  } catch (const GsnError& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::IoError || e.code() == ErrorCode::InvalidConfig
               ? kUsageError
               : kDomainFailure;
  }
  err << "no subcommand\n";
  return kUsageError;
}

}  // namespace gsn
