#include <doctest.h>

#include <random>
#include <set>

#include "asmprop/signature.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace asmprop;
using testing::ctl;
using testing::load_model;
using testing::model_text;

namespace {

Signature clock_signature() { return extract_signature(load_model("Clock.asm")).value(); }

AsmSpecification clock_with(const std::string& from, const std::string& to) {
    std::string text = model_text("Clock.asm");
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    auto r = parse_asm(text);
    REQUIRE(r.ok());
    return r.value();
}

void collect_names(const Term& t, std::set<std::string>& out) {
    if (t.kind == TermKind::Apply) out.insert(t.name);
    for (const auto& o : t.operands) collect_names(o, out);
}

void collect_names(const Formula& f, std::set<std::string>& out) {
    if (f.kind == FormulaKind::Atom) collect_names(f.atom, out);
    for (const auto& o : f.operands) collect_names(o, out);
}

}  // namespace

TEST_SUITE("signature") {

TEST_CASE("clock signature lists domains and functions") {
    auto sig = clock_signature();
    REQUIRE(sig.domains().size() == 4);
    CHECK(sig.domains()[0].name == "Boolean");
    CHECK(sig.domain("Second")->hi == 59);
    CHECK(sig.domain("Minute")->hi == 59);
    CHECK(sig.domain("Hour")->hi == 23);
    CHECK(sig.function_names() == std::vector<std::string>{"signal", "sec", "min", "h"});
    CHECK(sig.function("signal")->kind == FunctionKind::Monitored);
    CHECK(sig.function("signal")->result_domain == "Boolean");
    CHECK(sig.function("sec")->result_domain == "Second");
    CHECK(sig.function("h")->kind == FunctionKind::Controlled);
}

TEST_CASE("duplicate function names are rejected") {
    auto spec = clock_with("controlled h: Hour", "controlled h: Hour\n    controlled sec: Hour");
    auto r = extract_signature(spec);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().contains("duplicate-symbol"));
}

TEST_CASE("undeclared domains are rejected") {
    auto spec = clock_with("controlled h: Hour", "controlled h: Hour\n    controlled x: Missing");
    auto r = extract_signature(spec);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().contains("undeclared-domain"));
}

TEST_CASE("unbounded domains are outside the subset") {
    auto spec = clock_with("controlled h: Hour", "controlled h: Hour\n    controlled n: Integer");
    auto r = extract_signature(spec);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().contains("unsupported-construct"));
}

TEST_CASE("the rollover property type-checks") {
    auto r = typecheck_formula(ctl("AG(min = 59 implies AX(min = 0))"), Logic::CTL, clock_signature());
    REQUIRE(r.ok());
    CHECK(r.value().symbols == std::vector<std::string>{"min"});
}

TEST_CASE("unknown symbols suggest the nearest declared name") {
    auto r = typecheck_formula(ctl("AG(minute = 59)"), Logic::CTL, clock_signature());
    REQUIRE_FALSE(r.ok());
    const auto& d = r.diagnostics().front();
    CHECK(d.code == "unknown-symbol");
    CHECK(d.message == "unknown symbol 'minute' (did you mean 'min'?)");
}

TEST_CASE("an unknown symbol is reported once per formula") {
    auto r = typecheck_formula(ctl("AG(minute = 59 implies AX(minute = 0))"), Logic::CTL, clock_signature());
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().size() == 1);
}

TEST_CASE("Boolean compared to an integer is a type mismatch") {
    auto r = typecheck_formula(ctl("AG(signal = 59)"), Logic::CTL, clock_signature());
    REQUIRE_FALSE(r.ok());
    const auto& d = r.diagnostics().front();
    CHECK(d.code == "type-mismatch");
    CHECK(d.message.find("Boolean") != std::string::npos);
    CHECK(d.message.find("integer") != std::string::npos);
}

TEST_CASE("integer atoms are not properties") {
    auto r = typecheck_formula(ctl("AG(sec)"), Logic::CTL, clock_signature());
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().contains("non-boolean-atom"));
}

TEST_CASE("clock specification type-checks cleanly") {
    CHECK(typecheck_spec(load_model("Clock.asm")).empty());
    CHECK(typecheck_spec(load_model("TrafficLight.asm")).empty());
}

TEST_CASE("init values must lie in the domain") {
    auto d = typecheck_spec(clock_with("function sec = 0", "function sec = 99"));
    CHECK(d.contains("value-out-of-domain"));
}

TEST_CASE("monitored functions cannot be updated") {
    auto d = typecheck_spec(clock_with("sec := (sec + 1) mod 60", "par sec := (sec + 1) mod 60 signal := false endpar"));
    CHECK(d.contains("update-to-monitored"));
}

TEST_CASE("unknown macro calls are reported") {
    auto d = typecheck_spec(clock_with("r_IncMinHours[] endif", "r_Missing[] endif"));
    CHECK(d.contains("unknown-macro"));
}

TEST_CASE("agent rendering is a numbered list with the declared functions") {
    auto r = typecheck_formula(ctl("AG(minute = 59)"), Logic::CTL, clock_signature());
    REQUIRE_FALSE(r.ok());
    CHECK(render_diagnostics(r.diagnostics(), Audience::Agent) ==
          "E1 unknown symbol 'minute' (did you mean 'min'?); declared functions: signal, sec, min, h\n");
}

TEST_CASE("rendering nothing gives nothing") {
    CHECK(render_diagnostics(Diagnostics{}, Audience::Agent).empty());
    CHECK(render_diagnostics(Diagnostics{}, Audience::Human).empty());
}

TEST_CASE("two diagnostics render as two numbered lines in order") {
    auto r = typecheck_formula(ctl("AG(minute = 59 and hour = 1)"), Logic::CTL, clock_signature());
    REQUIRE_FALSE(r.ok());
    const std::string text = render_diagnostics(r.diagnostics(), Audience::Agent);
    auto first = text.find("E1 unknown symbol 'minute'");
    auto second = text.find("E2 unknown symbol 'hour'");
    CHECK(first == 0);
    CHECK(second != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("human rendering points at the source") {
    const std::string source = "AG(minute = 59)";
    auto r = typecheck_formula(ctl(source), Logic::CTL, clock_signature());
    const std::string text = render_diagnostics(r.diagnostics(), Audience::Human, source, "<formula>");
    CHECK(text.find("<formula>:1:4") != std::string::npos);
    CHECK(text.find("^") != std::string::npos);
}

TEST_CASE("accepted formulas only mention declared names") {
    auto sig = clock_signature();
    std::set<std::string> declared;
    for (const auto& n : sig.function_names()) declared.insert(n);
    std::mt19937 rng(7);
    int accepted = 0, rejected = 0;
    for (int i = 0; i < 400; ++i) {
        Formula f = oracle::random_formula(rng, Logic::CTL, 3);
        auto r = typecheck_formula(f, Logic::CTL, sig);
        std::set<std::string> names;
        collect_names(f, names);
        bool unknown = false;
        for (const auto& n : names) unknown = unknown || !declared.count(n);
        if (r.ok()) {
            ++accepted;
            CHECK_FALSE(unknown);
            for (const auto& s : r.value().symbols) CHECK(declared.count(s) == 1);
            auto again = typecheck_formula(ctl(print_formula(f, FormulaStyle::Uppercase)), Logic::CTL, sig);
            CHECK(again.ok());
        } else {
            ++rejected;
            if (unknown) CHECK(r.diagnostics().contains("unknown-symbol"));
        }
        auto twice = typecheck_formula(f, Logic::CTL, sig);
        CHECK(twice.ok() == r.ok());
        if (!r.ok()) CHECK(twice.diagnostics() == r.diagnostics());
    }
    CHECK(accepted > 0);
    CHECK(rejected > 0);
}

TEST_CASE("summary names every function with its kind") {
    const std::string s = clock_signature().summary();
    for (const char* name : {"signal", "sec", "min", "h", "Second", "Minute", "Hour", "monitored", "controlled"})
        CHECK(s.find(name) != std::string::npos);
}

}  // TEST_SUITE
