#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "asmprop/agent.hpp"
#include "asmprop/bridge.hpp"
#include "asmprop/checker.hpp"
#include "asmprop/files.hpp"
#include "asmprop/interpreter.hpp"
#include "asmprop/signature.hpp"
#include "asmprop/smv.hpp"
#include "asmprop/syntax.hpp"

namespace asmprop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Network:
        case ErrorKind::HttpStatus:
        case ErrorKind::FixtureExhausted:
        case ErrorKind::UnparseableResponse:
            return kBackend;
        case ErrorKind::StateLimitExceeded:
        case ErrorKind::TimeLimitExceeded:
        case ErrorKind::Cancelled:
            return kLimit;
        case ErrorKind::RepairBudgetExhausted:
            return kFails;
        default:
            return kUsage;
    }
}

std::vector<std::string> split_words(const std::string& line) {
    std::vector<std::string> words;
    std::string current;
    bool in_word = false, quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '\\' && i + 1 < line.size()) {
            current += line[++i];
            in_word = true;
        } else if (c == '"') {
            quoted = !quoted;
            in_word = true;
        } else if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
            if (in_word) words.push_back(std::move(current));
            current.clear();
            in_word = false;
        } else {
            current += c;
            in_word = true;
        }
    }
    if (quoted) throw Error(ErrorKind::InvalidArgument, "unterminated quote");
    if (in_word) words.push_back(std::move(current));
    return words;
}

namespace {

/// Parse or type errors in an input file, rendered against its source.
struct SourceError {
    Diagnostics diagnostics;
    std::string source;
    std::string file;
};

struct LoadedSpec {
    fs::path path;
    std::string source;
    AsmSpecification spec;
};

LoadedSpec load_spec(const fs::path& path) {
    LoadedSpec l{path, read_text_file(path), {}};
    auto parsed = parse_asm(l.source);
    if (!parsed) throw SourceError{parsed.diagnostics(), l.source, path.string()};
    l.spec = std::move(parsed).value();
    auto diags = typecheck_spec(l.spec);
    if (diags.has_errors()) throw SourceError{diags, l.source, path.string()};
    return l;
}

struct LoadedScenario {
    std::string source;
    AvallaScenario scenario;
};

LoadedScenario load_scenario(const fs::path& path) {
    LoadedScenario l{read_text_file(path), {}};
    auto parsed = parse_avalla(l.source);
    if (!parsed) throw SourceError{parsed.diagnostics(), l.source, path.string()};
    l.scenario = std::move(parsed).value();
    return l;
}

/// Everything a command line can set; one instance per parsed line.
struct Invocation {
    std::string spec_path;
    std::string scenario_path;
    std::string requirement;
    std::string logic;
    std::string out;
    std::string formula;
    std::vector<std::string> properties;
    int count = 3;
    int index = 0;
    bool semantic_repair = false;
    bool witness = false;
    bool trace = false;
    std::optional<std::size_t> limit_states;
    std::optional<double> limit_time;
};

std::optional<Logic> logic_from(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "ctl" || text == "CTL") return Logic::CTL;
    if (text == "ltl" || text == "LTL") return Logic::LTL;
    throw Error(ErrorKind::InvalidArgument, "logic must be ctl or ltl, got '" + text + "'");
}

/// Parses with the requested logic, or tries CTL then LTL.
std::pair<Formula, Logic> parse_formula_arg(const std::string& text, std::optional<Logic> logic) {
    if (logic) {
        auto f = parse_property(text, *logic, true);
        if (!f) throw SourceError{f.diagnostics(), text, "<formula>"};
        return {std::move(f).value(), *logic};
    }
    auto ctl = parse_property(text, Logic::CTL, true);
    if (ctl) return {std::move(ctl).value(), Logic::CTL};
    auto ltl = parse_property(text, Logic::LTL, true);
    if (ltl) return {std::move(ltl).value(), Logic::LTL};
    throw SourceError{ctl.diagnostics(), text, "<formula>"};
}

std::string read_arg_text(const std::string& value) {
    if (!value.empty() && value.front() == '@') {
        std::string text = read_text_file(value.substr(1));
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        return text;
    }
    return value;
}

std::string timestamp_for_file() {
    auto now = std::chrono::system_clock::now();
    auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
    std::time_t tt = std::chrono::system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y%m%dT%H%M%S") << std::setw(3) << std::setfill('0') << ms << 'Z';
    return out.str();
}

class Session {
public:
    Session(Settings settings, bool json, Streams io, const std::atomic<bool>* cancel)
        : settings_(std::move(settings)), json_(json), io_(io), cancel_(cancel) {}

    int dispatch(const std::string& command, const Invocation& inv, LoadedSpec& spec);
    int repl(LoadedSpec spec);

private:
    int check(const Invocation& inv, const LoadedSpec& spec);
    int formalize(const Invocation& inv, LoadedSpec& spec);
    int elicit(const Invocation& inv, const LoadedSpec& spec);
    int explain_prop(const Invocation& inv, const LoadedSpec& spec);
    int explain_scenario(const Invocation& inv, const LoadedSpec& spec);
    int export_cex(const Invocation& inv, const LoadedSpec& spec);
    int emit_smv_cmd(const Invocation& inv, const LoadedSpec& spec);
    int run_scenario_cmd(const Invocation& inv, const LoadedSpec& spec);

    Limits limits(const Invocation& inv) const {
        Limits l;
        l.max_states = inv.limit_states.value_or(settings_.max_states);
        l.max_time = inv.limit_time ? std::chrono::milliseconds(static_cast<long long>(*inv.limit_time * 1000))
                                    : settings_.max_time;
        l.cancel = cancel_;
        return l;
    }

    /// Runs an agent task and always persists its transcript.
    template <class Fn>
    auto with_agent(const std::string& task, Fn&& fn) -> decltype(fn(std::declval<Agent&>()));

    fs::path save_transcript(const AgentTranscript& t, const std::string& outcome);
    void emit(const json& record) { io_.out << record.dump() << "\n"; }

    Settings settings_;
    bool json_;
    Streams io_;
    const std::atomic<bool>* cancel_;
    fs::path last_transcript_;
};

fs::path Session::save_transcript(const AgentTranscript& t, const std::string& outcome) {
    const std::string stem = timestamp_for_file() + "-" + t.task();
    fs::path path = settings_.transcripts_dir / (stem + ".jsonl");
    for (int n = 2; fs::exists(path); ++n) path = settings_.transcripts_dir / (stem + "-" + std::to_string(n) + ".jsonl");
    write_file_atomic(path, t.to_jsonl(outcome));
    last_transcript_ = path;
    return path;
}

template <class Fn>
auto Session::with_agent(const std::string& task, Fn&& fn) -> decltype(fn(std::declval<Agent&>())) {
    (void)task;
    auto backend = make_backend(settings_.agent);
    Agent agent(*backend, settings_.agent, PromptLibrary::load(settings_.prompt_dir));
    try {
        auto result = fn(agent);
        save_transcript(result.transcript, "ok");
        return result;
    } catch (const AgentError& e) {
        auto path = save_transcript(e.transcript(), to_string(e.kind()));
        io_.err << "transcript: " << path.string() << "\n";
        throw;
    }
}

std::string summarize_trace(const Trace& t, const Machine& m, bool full) {
    std::ostringstream out;
    out << t.steps() << " step(s)";
    if (t.is_lasso()) out << ", loops back to step " << *t.loop_start;
    if (full) {
        for (std::size_t i = 0; i < t.states.size(); ++i) out << "\n      " << i << ": " << m.format_state(t.states[i]);
    } else {
        out << "; final state: " << m.format_state(t.states.back());
    }
    return out.str();
}

json trace_json(const Trace& t, const Machine& m) {
    json states = json::array();
    for (const auto& s : t.states) states.push_back(m.format_state(s));
    json j = {{"steps", t.steps()}, {"states", states}};
    if (t.is_lasso()) j["loop_start"] = *t.loop_start;
    return j;
}

int Session::check(const Invocation& inv, const LoadedSpec& loaded) {
    AsmSpecification spec = loaded.spec;
    const auto logic = logic_from(inv.logic);
    for (const auto& text : inv.properties) {
        auto [formula, l] = parse_formula_arg(text, logic);
        PropertyDecl decl;
        decl.logic = l;
        decl.formula = std::move(formula);
        decl.source_text = text;
        spec.properties.push_back(std::move(decl));
    }
    if (spec.properties.empty()) {
        if (json_) emit({{"command", "check"}, {"properties", json::array()}});
        else io_.out << "no properties to check\n";
        return kSuccess;
    }

    const auto results = verify_spec(spec, limits(inv), settings_.ltl_bound);
    std::shared_ptr<const Machine> machine;
    int code = kSuccess;
    json records = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const std::string text = std::string(r.property.logic == Logic::CTL ? "CTLSPEC " : "LTLSPEC ") +
                                 print_formula(r.property.formula, FormulaStyle::Uppercase);
        json rec = {{"index", i + 1}, {"property", text}};
        if (!r.diagnostics.empty() && r.diagnostics.has_errors()) {
            rec["status"] = "ill-typed";
            rec["diagnostics"] = to_json(r.diagnostics);
            if (!json_) {
                io_.out << "[" << i + 1 << "] " << text << ": ill-typed\n";
                io_.err << render_diagnostics(r.diagnostics, Audience::Human, text, "<property>");
            }
            code = std::max(code, int(kUsage));
        } else if (r.error) {
            rec["status"] = "error";
            rec["error"] = *r.error;
            if (!json_) io_.out << "[" << i + 1 << "] " << text << ": error: " << *r.error << "\n";
            const bool limit = r.error->find("limit") != std::string::npos || r.error->find("cancel") != std::string::npos;
            code = std::max(code, limit ? int(kLimit) : int(kUsage));
        } else {
            const Verdict& v = *r.verdict;
            rec["status"] = v.holds ? "holds" : "fails";
            rec["verdict"] = v.describe();
            rec["exact"] = v.exact;
            rec["states"] = v.stats.states;
            if (!json_) io_.out << "[" << i + 1 << "] " << text << ": " << v.describe() << "\n";
            if (v.evidence) {
                if (!machine) machine = Machine::create([&] {
                    auto s = spec;
                    s.properties.clear();
                    return s;
                }());
                const char* label = v.evidence_kind == EvidenceKind::Witness ? "witness" : "counterexample";
                rec[label] = trace_json(*v.evidence, *machine);
                if (!json_) io_.out << "    " << label << ": " << summarize_trace(*v.evidence, *machine, inv.trace) << "\n";
            }
            if (!v.holds && code == kSuccess) code = kFails;
        }
        records.push_back(std::move(rec));
    }
    if (json_) emit({{"command", "check"}, {"properties", records}, {"exit_code", code}});
    return code;
}

int Session::formalize(const Invocation& inv, LoadedSpec& loaded) {
    const auto logic = logic_from(inv.logic.empty() ? "ctl" : inv.logic);
    const std::string requirement = read_arg_text(inv.requirement);
    auto saved = settings_.agent.semantic_repair;
    if (inv.semantic_repair) settings_.agent.semantic_repair = true;
    auto result = with_agent("formalize", [&](Agent& a) {
        return a.formalize(loaded.spec, requirement, *logic, loaded.source);
    });
    settings_.agent.semantic_repair = saved;

    if (!result.requirement.recognized)
        io_.err << "warning: requirement does not follow an EARS pattern\n";
    const std::string formula = print_formula(result.formula.formula, FormulaStyle::Uppercase);
    const std::string enriched_text = print_asm(result.enriched);
    if (!inv.out.empty()) write_file_atomic(inv.out, enriched_text);
    if (json_) {
        json j = {{"command", "formalize"},
                  {"formula", formula},
                  {"logic", to_string(*logic)},
                  {"ears", to_string(result.requirement.pattern)},
                  {"iterations", result.transcript.iterations()},
                  {"transcript", last_transcript_.string()}};
        if (!inv.out.empty()) j["out"] = inv.out;
        emit(j);
    } else {
        io_.out << formula << "\n";
        io_.out << "transcript: " << last_transcript_.string() << "\n";
        if (!inv.out.empty()) io_.out << "wrote " << inv.out << "\n";
    }
    loaded.spec = result.enriched;
    loaded.source = enriched_text;
    return kSuccess;
}

int Session::elicit(const Invocation& inv, const LoadedSpec& loaded) {
    auto result = with_agent("elicit", [&](Agent& a) { return a.elicit_properties(loaded.spec, inv.count, loaded.source); });
    if (json_) {
        emit({{"command", "elicit"}, {"properties", result.properties}, {"transcript", last_transcript_.string()}});
    } else {
        for (std::size_t i = 0; i < result.properties.size(); ++i)
            io_.out << i + 1 << ". " << result.properties[i] << "\n";
    }
    return kSuccess;
}

int Session::explain_prop(const Invocation& inv, const LoadedSpec& loaded) {
    Formula formula;
    Logic logic = Logic::CTL;
    if (!inv.formula.empty() && inv.index > 0)
        throw Error(ErrorKind::InvalidArgument, "give either --formula or --index, not both");
    if (!inv.formula.empty()) {
        std::tie(formula, logic) = parse_formula_arg(read_arg_text(inv.formula), logic_from(inv.logic));
    } else if (inv.index > 0) {
        if (static_cast<std::size_t>(inv.index) > loaded.spec.properties.size())
            throw Error(ErrorKind::InvalidArgument, "the specification has " +
                                                        std::to_string(loaded.spec.properties.size()) +
                                                        " propert(ies), no index " + std::to_string(inv.index));
        const auto& p = loaded.spec.properties[inv.index - 1];
        formula = p.formula;
        logic = p.logic;
    } else {
        throw Error(ErrorKind::InvalidArgument, "explain-prop needs --formula or --index");
    }
    auto result = with_agent("explain-formula", [&](Agent& a) { return a.explain_formula(loaded.spec, formula, logic); });
    for (const auto& n : result.transcript.notes())
        if (n.kind == "coverage-warning") io_.err << "warning: " << n.text << "\n";
    if (json_) emit({{"command", "explain-prop"}, {"text", result.text}, {"transcript", last_transcript_.string()}});
    else io_.out << result.text << "\n";
    return kSuccess;
}

int Session::explain_scenario(const Invocation& inv, const LoadedSpec& loaded) {
    auto scenario = load_scenario(inv.scenario_path);
    auto result = with_agent("explain-scenario", [&](Agent& a) {
        return a.explain_scenario(loaded.spec, scenario.scenario, scenario.source);
    });
    if (json_) emit({{"command", "explain-scenario"}, {"text", result.text}, {"transcript", last_transcript_.string()}});
    else io_.out << result.text << "\n";
    return kSuccess;
}

int Session::export_cex(const Invocation& inv, const LoadedSpec& loaded) {
    const auto& props = loaded.spec.properties;
    if (inv.index < 1 || static_cast<std::size_t>(inv.index) > props.size())
        throw Error(ErrorKind::InvalidArgument, "--property-index must be between 1 and " + std::to_string(props.size()));
    if (inv.out.empty()) throw Error(ErrorKind::InvalidArgument, "export-cex needs --out");
    const PropertyDecl& p = props[inv.index - 1];

    AsmSpecification bare = loaded.spec;
    bare.properties.clear();
    auto machine = Machine::create(bare);
    auto sig = extract_signature(bare);
    auto typed = typecheck_formula(p.formula, p.logic, sig.value());
    if (!typed) throw SourceError{typed.diagnostics(), p.source_text, "<property>"};
    auto ks = build_kripke(machine, limits(inv));
    Verdict v = check_property(ks, typed.value(), settings_.ltl_bound);

    const std::string printed = print_formula(p.formula, FormulaStyle::Uppercase);
    AvallaScenario scenario;
    fs::path out(inv.out);
    fs::path base = out.has_parent_path() ? out.parent_path() : fs::path(".");
    std::string load = fs::relative(fs::absolute(loaded.path), fs::absolute(base)).generic_string();
    if (load.empty() || load.rfind("..", 0) == 0) load = fs::weakly_canonical(fs::absolute(loaded.path)).generic_string();
    if (inv.witness) {
        if (!v.holds || v.evidence_kind != EvidenceKind::Witness)
            throw Error(ErrorKind::InvalidArgument,
                        "property " + std::to_string(inv.index) + " (" + printed + ") has no witness to export");
        scenario = witness_to_avalla(*v.evidence, *machine, out.stem().string(), load);
    } else {
        if (v.holds)
            throw Error(ErrorKind::InvalidArgument, "property " + std::to_string(inv.index) + " (" + printed + ") " +
                                                        v.describe() + "; there is no counterexample to export");
        scenario = trace_to_avalla(*v.evidence, *machine, out.stem().string(), load);
    }
    write_file_atomic(out, print_avalla(scenario));
    if (json_) {
        emit({{"command", "export-cex"},
              {"property", printed},
              {"out", inv.out},
              {"steps", v.evidence->steps()},
              {"lasso", v.evidence->is_lasso()}});
    } else {
        io_.out << "wrote " << inv.out << " (" << (inv.witness ? "witness" : "counterexample") << ", "
                << summarize_trace(*v.evidence, *machine, false) << ")\n";
    }
    return kSuccess;
}

int Session::emit_smv_cmd(const Invocation& inv, const LoadedSpec& loaded) {
    SmvModel model = emit_smv(loaded.spec);
    auto diags = emitted_roundtrip_check(model);
    if (diags.has_errors()) {
        io_.err << "emitted model failed the internal grammar check:\n" << render_diagnostics(diags, Audience::Human, model.text, "<smv>");
        return kUsage;
    }
    if (!inv.out.empty()) write_file_atomic(inv.out, model.text);
    if (json_) {
        json vars = json::object();
        for (const auto& [label, name] : model.var_map) vars[label] = name;
        json j = {{"command", "emit-smv"}, {"variables", vars}};
        if (inv.out.empty()) j["text"] = model.text;
        else j["out"] = inv.out;
        emit(j);
    } else if (inv.out.empty()) {
        io_.out << model.text;
    } else {
        io_.out << "wrote " << inv.out << "\n";
    }
    return kSuccess;
}

int Session::run_scenario_cmd(const Invocation& inv, const LoadedSpec& loaded) {
    auto scenario = load_scenario(inv.scenario_path);
    const auto result = Machine::create(loaded.spec)->run_scenario(scenario.scenario);
    std::size_t checks = 0;
    for (const auto& c : scenario.scenario.commands)
        if (c.kind == CommandKind::Check) ++checks;
    if (json_) {
        json j = {{"command", "run-scenario"}, {"passed", result.passed}, {"steps", result.steps_executed}};
        if (result.failed_check) {
            j["failed_check"] = {{"command_index", result.failed_check->command_index},
                                 {"expected", print_term(result.failed_check->expected)},
                                 {"actual", result.failed_check->actual_text}};
        }
        emit(j);
    } else if (result.passed) {
        io_.out << "passed: " << result.steps_executed << " step(s), " << checks << " check(s)\n";
    } else {
        const auto& f = *result.failed_check;
        io_.out << "failed: check at command " << f.command_index + 1 << " does not hold\n"
                << "  expected: " << print_term(f.expected) << "\n"
                << "  actual:   " << f.actual_text << "\n";
    }
    return result.passed ? kSuccess : kFails;
}

int Session::dispatch(const std::string& command, const Invocation& inv, LoadedSpec& spec) {
    if (command == "check") return check(inv, spec);
    if (command == "formalize") return formalize(inv, spec);
    if (command == "elicit") return elicit(inv, spec);
    if (command == "explain-prop") return explain_prop(inv, spec);
    if (command == "explain-scenario") return explain_scenario(inv, spec);
    if (command == "export-cex") return export_cex(inv, spec);
    if (command == "emit-smv") return emit_smv_cmd(inv, spec);
    if (command == "run-scenario") return run_scenario_cmd(inv, spec);
    throw Error(ErrorKind::InvalidArgument, "unknown command '" + command + "'");
}

/// Registers the spec-level subcommands. `with_spec` adds the leading
/// specification positional (absent inside the REPL).
void add_commands(CLI::App& app, Invocation& inv, bool with_spec) {
    auto spec_arg = [&](CLI::App* c) {
        if (with_spec) c->add_option("spec", inv.spec_path, "AsmetaL specification")->required()->check(CLI::ExistingFile);
    };
    auto limits = [&](CLI::App* c) {
        c->add_option("--limit-states", inv.limit_states, "maximum number of reachable states");
        c->add_option("--limit-time", inv.limit_time, "state-space build time limit in seconds");
    };

    auto* check = app.add_subcommand("check", "model-check the properties of a specification");
    spec_arg(check);
    check->add_option("--property", inv.properties, "additional property to check (repeatable)");
    check->add_option("--logic", inv.logic, "logic of --property: ctl or ltl (default: detect)");
    check->add_flag("--trace", inv.trace, "print every state of counterexamples and witnesses");
    limits(check);

    auto* formalize = app.add_subcommand("formalize", "turn a requirement into a validated property");
    spec_arg(formalize);
    formalize->add_option("--req", inv.requirement, "requirement text, or @file")->required();
    formalize->add_option("--logic", inv.logic, "ctl or ltl")->check(CLI::IsMember({"ctl", "ltl", "CTL", "LTL"}));
    formalize->add_option("--out", inv.out, "write the enriched specification here");
    formalize->add_flag("--semantic-repair", inv.semantic_repair, "feed a failing verdict back for one more round");

    auto* elicit = app.add_subcommand("elicit", "ask for the most important properties");
    spec_arg(elicit);
    elicit->add_option("--count", inv.count, "number of properties")->check(CLI::PositiveNumber);

    auto* explain = app.add_subcommand("explain-prop", "explain a property in natural language");
    spec_arg(explain);
    explain->add_option("--formula", inv.formula, "property text, or @file");
    explain->add_option("--index", inv.index, "1-based index of a property of the specification");
    explain->add_option("--logic", inv.logic, "logic of --formula: ctl or ltl (default: detect)");

    auto* explain_sc = app.add_subcommand("explain-scenario", "explain an Avalla scenario");
    spec_arg(explain_sc);
    explain_sc->add_option("scenario", inv.scenario_path, "Avalla scenario")->required()->check(CLI::ExistingFile);

    auto* cex = app.add_subcommand("export-cex", "export a counterexample as an Avalla scenario");
    spec_arg(cex);
    cex->add_option("--property-index", inv.index, "1-based property index")->required();
    cex->add_option("--out", inv.out, "scenario file to write")->required();
    cex->add_flag("--witness", inv.witness, "export the witness of a holding existential property");
    limits(cex);

    auto* smv = app.add_subcommand("emit-smv", "translate to NuSMV input");
    spec_arg(smv);
    smv->add_option("--out", inv.out, "write the model here instead of stdout");

    auto* run = app.add_subcommand("run-scenario", "run an Avalla scenario");
    spec_arg(run);
    run->add_option("scenario", inv.scenario_path, "Avalla scenario")->required()->check(CLI::ExistingFile);
}

std::string parsed_command(const CLI::App& app) {
    for (const auto* sub : app.get_subcommands()) return sub->get_name();
    return {};
}

constexpr const char* kReplHelp =
    "commands (options as on the command line, without the specification):\n"
    "  check [--property P] [--logic ctl|ltl] [--trace]\n"
    "  formalize --req TEXT [--logic ctl|ltl] [--semantic-repair]\n"
    "  elicit [--count N]\n"
    "  explain-prop (--formula P | --index N)\n"
    "  explain-scenario FILE\n"
    "  export-cex --property-index N --out FILE [--witness]\n"
    "  emit-smv [--out FILE]\n"
    "  run-scenario FILE\n"
    "  props          list the properties of the loaded specification\n"
    "  :save [FILE]   write the specification (default: the loaded file)\n"
    "  :quit\n";

int handle_errors(Streams& io, bool json_mode, const std::function<int()>& body);

int Session::repl(LoadedSpec spec) {
    io_.out << "loaded " << spec.path.string() << " (" << spec.spec.properties.size() << " propert"
            << (spec.spec.properties.size() == 1 ? "y" : "ies") << "); type 'help' for commands\n";
    bool dirty = false;
    int last = kSuccess;
    std::string line;
    while (true) {
        io_.out << "asmprop> " << std::flush;
        if (!std::getline(io_.in, line)) break;
        std::vector<std::string> words;
        try {
            words = split_words(line);
        } catch (const Error& e) {
            io_.err << "error: " << e.what() << "\n";
            continue;
        }
        if (words.empty()) continue;
        const std::string& head = words.front();
        if (head == ":quit" || head == ":q" || head == "exit") break;
        if (head == "help") {
            io_.out << kReplHelp;
            continue;
        }
        if (head == "props") {
            for (std::size_t i = 0; i < spec.spec.properties.size(); ++i) {
                const auto& p = spec.spec.properties[i];
                io_.out << "[" << i + 1 << "] " << (p.logic == Logic::CTL ? "CTLSPEC " : "LTLSPEC ")
                        << print_formula(p.formula, FormulaStyle::Uppercase) << "\n";
            }
            continue;
        }
        if (head == ":save") {
            fs::path target = words.size() > 1 ? fs::path(words[1]) : spec.path;
            last = handle_errors(io_, json_, [&] {
                write_file_atomic(target, print_asm(spec.spec));
                io_.out << "wrote " << target.string() << "\n";
                dirty = false;
                return int(kSuccess);
            });
            continue;
        }

        CLI::App app{"asmprop repl"};
        app.require_subcommand(1, 1);
        Invocation inv;
        add_commands(app, inv, false);
        std::vector<std::string> reversed(words.rbegin(), words.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            app.exit(e, io_.out, io_.err);
            last = kUsage;
            continue;
        }
        const std::string command = parsed_command(app);
        const std::size_t before = spec.spec.properties.size();
        last = handle_errors(io_, json_, [&] { return dispatch(command, inv, spec); });
        if (spec.spec.properties.size() != before) dirty = true;
    }
    if (dirty) io_.err << "warning: unsaved properties discarded\n";
    return last;
}

int handle_errors(Streams& io, bool json_mode, const std::function<int()>& body) {
    auto report = [&](const std::string& kind, const std::string& message, int code, const json& extra = {}) {
        if (json_mode) {
            nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
            if (!extra.is_null()) j["diagnostics"] = extra;
            io.out << j.dump() << "\n";
        }
        return code;
    };
    try {
        return body();
    } catch (const SourceError& e) {
        io.err << render_diagnostics(e.diagnostics, Audience::Human, e.source, e.file);
        return report("diagnostics", e.file, kUsage, to_json(e.diagnostics));
    } catch (const DiagnosticsError& e) {
        io.err << render_diagnostics(e.diagnostics(), Audience::Human);
        return report("diagnostics", e.what(), kUsage, to_json(e.diagnostics()));
    } catch (const Error& e) {
        io.err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return report(to_string(e.kind()), e.what(), exit_code_for(e.kind()));
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return report("internal", e.what(), kUsage);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, Streams io, const Getenv& getenv, const std::atomic<bool>* cancel) {
    CLI::App app{"Property elicitation, formalization and checking for finite AsmetaL specifications", "asmprop"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    Invocation inv;
    bool json_out = false;
    std::string config_path, backend, fixtures, model, endpoint, prompt_dir, transcripts_dir;
    std::optional<double> temperature, timeout;
    std::optional<int> max_iterations, ltl_bound;

    app.add_flag("--json", json_out, "structured output on stdout");
    app.add_option("--config", config_path, "configuration file (default: ./asmprop.toml if present)");
    app.add_option("--backend", backend, "completion backend: live or replay")->check(CLI::IsMember({"live", "replay"}));
    app.add_option("--fixtures", fixtures, "replay fixture directory");
    app.add_option("--model", model, "model name for the live backend");
    app.add_option("--endpoint", endpoint, "chat-completions URL for the live backend");
    app.add_option("--temperature", temperature, "sampling temperature");
    app.add_option("--timeout", timeout, "request timeout in seconds");
    app.add_option("--max-iterations", max_iterations, "repair budget")->check(CLI::PositiveNumber);
    app.add_option("--prompt-dir", prompt_dir, "prompt template directory");
    app.add_option("--transcripts-dir", transcripts_dir, "where transcripts are written");
    app.add_option("--ltl-bound", ltl_bound, "lasso search bound for LTL properties")->check(CLI::PositiveNumber);

    add_commands(app, inv, true);
    auto* repl = app.add_subcommand("repl", "interactive session on one specification");
    repl->add_option("spec", inv.spec_path, "AsmetaL specification")->required()->check(CLI::ExistingFile);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, io.out, io.err);
        return code == 0 ? kSuccess : kUsage;
    }

    return handle_errors(io, json_out, [&] {
        Settings settings =
            load_settings(config_path.empty() ? fs::path("asmprop.toml") : fs::path(config_path), !config_path.empty(), getenv);
        if (!backend.empty()) settings.agent.backend = backend == "replay" ? BackendKind::Replay : BackendKind::Live;
        if (!fixtures.empty()) settings.agent.fixtures = fixtures;
        if (!model.empty()) settings.agent.model = model;
        if (!endpoint.empty()) settings.agent.endpoint = endpoint;
        if (temperature) settings.agent.temperature = *temperature;
        if (timeout) settings.agent.timeout = std::chrono::milliseconds(static_cast<long long>(*timeout * 1000));
        if (max_iterations) settings.agent.max_iterations = *max_iterations;
        if (!prompt_dir.empty()) settings.prompt_dir = prompt_dir;
        if (!transcripts_dir.empty()) settings.transcripts_dir = transcripts_dir;
        if (ltl_bound) settings.ltl_bound = *ltl_bound;

        Session session(std::move(settings), json_out, io, cancel);
        LoadedSpec spec = load_spec(inv.spec_path);
        const std::string command = parsed_command(app);
        if (command == "repl") return session.repl(std::move(spec));
        return session.dispatch(command, inv, spec);
    });
}

}  // namespace asmprop::cli
