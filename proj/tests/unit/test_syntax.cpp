#include <doctest.h>

#include <random>

#include "asmprop/syntax.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace asmprop;
using testing::ctl;
using testing::load_model;
using testing::model_text;

namespace {

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

Formula min_rolls_over() {
    Term min59 = Term::comparison(CompareOp::Eq, Term::apply("min"), Term::integer(59));
    Term min0 = Term::comparison(CompareOp::Eq, Term::apply("min"), Term::integer(0));
    return Formula::unary(TemporalOp::AG,
                          Formula::binary(FormulaKind::Implies, Formula::make_atom(min59),
                                          Formula::unary(TemporalOp::AX, Formula::make_atom(min0))));
}

}  // namespace

TEST_SUITE("asm-lang") {

TEST_CASE("clock specification parses to its declared structure") {
    auto spec = load_model("Clock.asm");
    CHECK(spec.name == "Clock");
    CHECK(spec.imports == std::vector<std::string>{"StandardLibrary"});
    REQUIRE(spec.domains.size() == 3);
    CHECK(spec.domains[0].name == "Second");
    CHECK(spec.domains[0].lo == 0);
    CHECK(spec.domains[0].hi == 59);
    CHECK(spec.domains[2].hi == 23);
    REQUIRE(spec.functions.size() == 4);
    CHECK(spec.functions[0].kind == FunctionKind::Monitored);
    for (int i = 1; i < 4; ++i) CHECK(spec.functions[i].kind == FunctionKind::Controlled);
    CHECK(spec.macro_rules.size() == 1);
    CHECK(spec.macro_rules[0].name == "r_IncMinHours");
    CHECK(spec.main_rule.name == "r_Main");
    REQUIRE(spec.init.size() == 3);
    for (const auto& entry : spec.init) CHECK(entry.value == Term::integer(0));
    CHECK(spec.init[0].function == "sec");
    CHECK(spec.init[2].function == "h");
}

TEST_CASE("empty input asks for the asm header") {
    auto r = parse_asm("");
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().front().message.find("expected 'asm'") != std::string::npos);
}

TEST_CASE("sequential blocks are reported as unsupported by name") {
    std::string text = model_text("Clock.asm");
    text = replace_once(text, "if signal then par", "if signal then seq");
    text = replace_once(text, "endpar endif", "endseq endif");
    auto r = parse_asm(text);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().front().code == "unsupported-construct");
    CHECK(r.diagnostics().front().message.find("seq") != std::string::npos);
}

TEST_CASE("other out-of-subset constructs are named") {
    for (const char* construct : {"choose", "forall", "let"}) {
        std::string text = model_text("Clock.asm");
        text = replace_once(text, "sec := (sec + 1) mod 60", std::string(construct) + " $x in Second do sec := $x");
        auto r = parse_asm(text);
        REQUIRE_FALSE(r.ok());
        CHECK(r.diagnostics().front().code == "unsupported-construct");
        CHECK(r.diagnostics().front().message.find(construct) != std::string::npos);
    }
}

TEST_CASE("uppercase and call-style spellings give the same formula") {
    auto upper = parse_property("AG (min = 59 implies AX (min = 0))", Logic::CTL, true);
    auto call = parse_property("ag(min = 59 implies ax(min = 0))", Logic::CTL, true);
    REQUIRE(upper.ok());
    REQUIRE(call.ok());
    CHECK(upper.value() == min_rolls_over());
    CHECK(call.value() == min_rolls_over());
}

TEST_CASE("strict mode rejects uppercase operators") {
    CHECK_FALSE(parse_property("AG(min = 0)", Logic::CTL, false).ok());
    CHECK(parse_property("ag(min = 0)", Logic::CTL, false).ok());
}

TEST_CASE("operators of the other logic are a mixed-logic error") {
    auto r = parse_property("AG(F(sec = 0))", Logic::CTL, true);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics().contains("mixed-logic"));
    auto l = parse_property("G(AX(sec = 0))", Logic::LTL, true);
    REQUIRE_FALSE(l.ok());
    CHECK(l.diagnostics().contains("mixed-logic"));
}

TEST_CASE("until in both spellings") {
    auto a = parse_property("A[sec = 0 U min = 1]", Logic::CTL, true);
    auto b = parse_property("au(sec = 0, min = 1)", Logic::CTL, true);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.value() == b.value());
    auto c = parse_property("sec = 0 U min = 1", Logic::LTL, true);
    auto d = parse_property("u(sec = 0, min = 1)", Logic::LTL, true);
    REQUIRE(c.ok());
    REQUIRE(d.ok());
    CHECK(c.value() == d.value());
}

TEST_CASE("clock scenario parses to six commands") {
    auto sc = testing::load_scenario("ClockScenario.avalla");
    CHECK(sc.name == "ClockScenario");
    CHECK(sc.load == "Clock.asm");
    REQUIRE(sc.commands.size() == 6);
    const Term state = Term::connective(
        LogicOp::And,
        Term::connective(LogicOp::And, Term::comparison(CompareOp::Eq, Term::apply("sec"), Term::integer(1)),
                         Term::comparison(CompareOp::Eq, Term::apply("min"), Term::integer(0))),
        Term::comparison(CompareOp::Eq, Term::apply("h"), Term::integer(0)));
    CHECK(sc.commands[0] == AvallaCommand::set(Term::apply("signal"), Term::boolean(true)));
    CHECK(sc.commands[1] == AvallaCommand::step());
    CHECK(sc.commands[2] == AvallaCommand::check(state));
    CHECK(sc.commands[3] == AvallaCommand::set(Term::apply("signal"), Term::boolean(false)));
    CHECK(sc.commands[4] == AvallaCommand::step());
    CHECK(sc.commands[5] == AvallaCommand::check(state));
    CHECK(sc.step_count() == 2);
}

TEST_CASE("scenario without commands is valid") {
    auto r = parse_avalla("scenario S\nload X.asm\n");
    REQUIRE(r.ok());
    CHECK(r.value().commands.empty());
}

TEST_CASE("setting a controlled location is syntactically fine") {
    auto r = parse_avalla("scenario S\nload Clock.asm\nset sec := 1;\n");
    REQUIRE(r.ok());
    CHECK(r.value().commands.size() == 1);
}

TEST_CASE("loop marker comment survives a round trip") {
    auto r = parse_avalla("scenario S\nload T.asm\nstep;\n// @loop-start step 0\nstep;\n");
    REQUIRE(r.ok());
    REQUIRE(r.value().commands.size() == 3);
    CHECK(r.value().commands[1].kind == CommandKind::LoopMarker);
    auto again = parse_avalla(print_avalla(r.value()));
    REQUIRE(again.ok());
    CHECK(again.value() == r.value());
}

TEST_CASE("uppercase printing uses canonical spacing") {
    CHECK(print_formula(min_rolls_over(), FormulaStyle::Uppercase) == "AG(min = 59 implies AX(min = 0))");
    CHECK(print_formula(min_rolls_over(), FormulaStyle::CallStyle) == "ag(min = 59 implies ax(min = 0))");
}

TEST_CASE("corpus specifications survive print and parse") {
    for (const char* name : {"Clock.asm", "ClockProperties.asm", "Toggle.asm", "Stuck.asm", "TrafficLight.asm"}) {
        CAPTURE(name);
        auto spec = load_model(name);
        auto again = parse_asm(print_asm(spec));
        REQUIRE(again.ok());
        CHECK(again.value() == spec);
        CHECK(print_asm(again.value()) == print_asm(spec));
    }
}

TEST_CASE("clock scenario survives print and parse") {
    auto sc = testing::load_scenario("ClockScenario.avalla");
    auto again = parse_avalla(print_avalla(sc));
    REQUIRE(again.ok());
    CHECK(again.value() == sc);
}

TEST_CASE("random formulas survive print and parse in both styles") {
    std::mt19937 rng(20240611);
    for (int i = 0; i < 400; ++i) {
        const Logic logic = i % 2 ? Logic::LTL : Logic::CTL;
        Formula f = oracle::random_formula(rng, logic, 4);
        for (auto style : {FormulaStyle::Uppercase, FormulaStyle::CallStyle}) {
            const std::string text = print_formula(f, style);
            CAPTURE(text);
            auto back = parse_property(text, logic, true);
            REQUIRE(back.ok());
            CHECK(back.value() == f);
        }
    }
}

TEST_CASE("parsing is deterministic") {
    const std::string text = model_text("TrafficLight.asm");
    CHECK(parse_asm(text).value() == parse_asm(text).value());
}

TEST_CASE("diagnostic positions point into the offending token") {
    const std::string text = "asm A\nsignature:\n    controlled x: Boolean\ndefinitions:\n    main rule r = x := ??\n";
    auto r = parse_asm(text);
    REQUIRE_FALSE(r.ok());
    const auto& d = r.diagnostics().front();
    REQUIRE(d.location.has_value());
    CHECK(d.location->line == 5);
    CHECK(d.location->column == 24);
}

TEST_CASE("missing main rule is reported") {
    auto r = parse_asm("asm A\nsignature:\n    controlled x: Boolean\ndefinitions:\ndefault init s0:\n    function x = true\n");
    CHECK_FALSE(r.ok());
}

}  // TEST_SUITE
