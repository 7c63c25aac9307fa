#include <doctest.h>

#include <random>

#include "asmprop/interpreter.hpp"
#include "asmprop/smv.hpp"
#include "helpers.hpp"

using namespace asmprop;
using testing::load_model;

namespace {

SmvValuation to_smv(const Machine& m, const SmvModel& model, const State& s) {
    SmvValuation v;
    for (std::size_t i = 0; i < m.layout().size(); ++i) {
        const auto& loc = m.layout().slot(i);
        const auto& name = model.var_map.at(i).second;
        if (loc.domain->kind == DomainKind::Enumeration) v[name] = {0, m.format_value(i, s.values[i])};
        else v[name] = {s.values[i].raw, {}};
    }
    return v;
}

State random_state(const Machine& m, std::mt19937& rng) {
    State s;
    for (std::size_t i = 0; i < m.layout().size(); ++i) {
        auto elems = m.layout().slot(i).domain->elements();
        std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
        s.values.push_back(elems[pick(rng)]);
    }
    return s;
}

}  // namespace

TEST_SUITE("smv-emit") {

TEST_CASE("clock model golden text") {
    auto model = emit_smv(load_model("Clock.asm"));
    const std::string expected =
        "-- Clock\n"
        "MODULE main\n"
        "VAR\n"
        "    signal : boolean;\n"
        "    sec : 0..59;\n"
        "    min : 0..59;\n"
        "    h : 0..23;\n"
        "ASSIGN\n"
        "    init(sec) := 0;\n"
        "    init(min) := 0;\n"
        "    init(h) := 0;\n"
        "    next(sec) :=\n"
        "        case\n"
        "            signal : (sec + 1) mod 60;\n"
        "            TRUE : sec;\n"
        "        esac;\n"
        "    next(min) :=\n"
        "        case\n"
        "            signal & sec = 59 : (min + 1) mod 60;\n"
        "            TRUE : min;\n"
        "        esac;\n"
        "    next(h) :=\n"
        "        case\n"
        "            signal & sec = 59 & min = 59 : (h + 1) mod 24;\n"
        "            TRUE : h;\n"
        "        esac;\n";
    CHECK(model.text == expected);
}

TEST_CASE("rollover property is lowered to SMV operators") {
    auto model = emit_smv(load_model("ClockProperties.asm"));
    REQUIRE(model.property_lines.size() == 3);
    CHECK(model.property_lines[0].second == "SPEC AG(min = 59 -> AX(min = 0))");
    CHECK(model.text.find("SPEC AG(min = 59 -> AX(min = 0))\n") != std::string::npos);
}

TEST_CASE("LTL properties use LTLSPEC") {
    auto model = emit_smv(load_model("Toggle.asm"));
    CHECK(model.text.find("LTLSPEC G(F(x = TRUE))") != std::string::npos);
}

TEST_CASE("enumerations become SMV enumerated types") {
    auto model = emit_smv(load_model("TrafficLight.asm"));
    CHECK(model.text.find("light : {RED, GREEN, YELLOW};") != std::string::npos);
    CHECK(model.text.find("DEFINE") != std::string::npos);
}

TEST_CASE("emitted models pass the internal check") {
    for (const char* name : {"Clock.asm", "ClockProperties.asm", "Toggle.asm", "Stuck.asm", "TrafficLight.asm"}) {
        CAPTURE(name);
        auto model = emit_smv(load_model(name));
        auto diags = emitted_roundtrip_check(model);
        CHECK(diags.empty());
    }
}

TEST_CASE("a deleted VAR line is an undeclared variable") {
    auto model = emit_smv(load_model("Clock.asm"));
    auto pos = model.text.find("    min : 0..59;\n");
    model.text.erase(pos, std::string("    min : 0..59;\n").size());
    CHECK(emitted_roundtrip_check(model).contains("undeclared-variable"));
}

TEST_CASE("a missing esac is a grammar error") {
    auto model = emit_smv(load_model("Clock.asm"));
    auto pos = model.text.find("esac;");
    model.text.erase(pos, 4);
    auto diags = emitted_roundtrip_check(model);
    CHECK(diags.contains("smv-syntax"));
}

TEST_CASE("emission is byte-identical across runs") {
    auto spec = load_model("TrafficLight.asm");
    CHECK(emit_smv(spec).text == emit_smv(spec).text);
}

TEST_CASE("identifiers avoid SMV keywords") {
    CHECK(smv_identifier("sec") == "sec");
    CHECK(smv_identifier("min") == "min");
    const std::string mangled = smv_identifier("next");
    CHECK(mangled != "next");
    CHECK(mangled == smv_identifier("next"));
    CHECK(smv_identifier("Mode") != smv_identifier("mode"));
}

TEST_CASE("emitted ASSIGN semantics agree with the interpreter") {
    for (const char* name : {"Clock.asm", "TrafficLight.asm", "Toggle.asm"}) {
        CAPTURE(name);
        auto spec = load_model(name);
        auto m = Machine::create(spec);
        auto model = emit_smv(spec);
        auto program = parse_smv(model.text);
        REQUIRE(program.ok());
        std::mt19937 rng(17);
        for (int i = 0; i < 300; ++i) {
            State s = random_state(*m, rng);
            State next;
            try {
                next = m->apply(s, m->compute_update_set(s));
            } catch (const Error&) {
                continue;
            }
            auto ours = to_smv(*m, model, next);
            auto theirs = smv_step(program.value(), to_smv(*m, model, s));
            for (std::size_t k = 0; k < m->layout().controlled_count(); ++k) {
                const auto& var = model.var_map[k].second;
                CHECK(theirs.at(var) == ours.at(var));
            }
        }
    }
}

TEST_CASE("reachable inconsistent updates are refused") {
    auto r = parse_asm(
        "asm C\nsignature:\n    domain D subsetof Integer\n    monitored go: Boolean\n    controlled x: D\n"
        "definitions:\n    domain D = {0 : 3}\n    main rule r_Main = par x := 1 if go then x := 2 endif endpar\n"
        "default init s0:\n    function x = 0\n");
    REQUIRE(r.ok());
    try {
        emit_smv(r.value());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedConstruct);
    }
}

}  // TEST_SUITE
