#include <doctest.h>

#include <random>

#include "asmprop/interpreter.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace asmprop;
using testing::load_model;
using testing::model_text;

namespace {

std::shared_ptr<const Machine> clock_machine() { return Machine::create(load_model("Clock.asm")); }

/// Clock state from controlled values and the monitored signal.
State clock_state(const Machine& m, int sec, int min, int h, bool signal) {
    State s;
    s.values.resize(m.layout().size());
    s.values[*m.layout().find("sec")] = Value::integer(sec);
    s.values[*m.layout().find("min")] = Value::integer(min);
    s.values[*m.layout().find("h")] = Value::integer(h);
    s.values[*m.layout().find("signal")] = Value::boolean(signal);
    return s;
}

AsmSpecification parse(const std::string& text) {
    auto r = parse_asm(text);
    REQUIRE(r.ok());
    return r.value();
}

AvallaScenario scenario(const std::string& text) {
    auto r = parse_avalla(text);
    REQUIRE(r.ok());
    return r.value();
}

}  // namespace

TEST_SUITE("interpreter") {

TEST_CASE("layout puts controlled locations first") {
    auto m = clock_machine();
    REQUIRE(m->layout().size() == 4);
    CHECK(m->layout().controlled_count() == 3);
    CHECK(m->layout().slot(0).label == "sec");
    CHECK(m->layout().slot(3).label == "signal");
    CHECK(m->layout().slot(3).monitored);
}

TEST_CASE("clock has one initial state per signal value") {
    auto m = clock_machine();
    auto init = m->initial_states();
    REQUIRE(init.size() == 2);
    CHECK(init[0] == clock_state(*m, 0, 0, 0, false));
    CHECK(init[1] == clock_state(*m, 0, 0, 0, true));
}

TEST_CASE("without monitored functions there is one initial state") {
    auto spec = load_model("Toggle.asm");
    CHECK(initial_states(spec).size() == 1);
}

TEST_CASE("a controlled function missing from init is an error") {
    std::string text = model_text("Clock.asm");
    text.erase(text.find("    function h = 0"));
    auto m = Machine::create(parse(text));
    CHECK_THROWS_AS(m->initial_states(), Error);
    try {
        m->initial_states();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingInit);
    }
}

TEST_CASE("full rollover updates all three counters") {
    auto m = clock_machine();
    auto u = m->compute_update_set(clock_state(*m, 59, 59, 23, true));
    REQUIRE(u.size() == 3);
    CHECK(u.get(*m->layout().find("sec")) == Value::integer(0));
    CHECK(u.get(*m->layout().find("min")) == Value::integer(0));
    CHECK(u.get(*m->layout().find("h")) == Value::integer(0));
}

TEST_CASE("no updates while the signal is off") {
    auto m = clock_machine();
    for (int sec : {0, 30, 59})
        for (int min : {0, 59}) CHECK(m->compute_update_set(clock_state(*m, sec, min, 23, false)).empty());
}

TEST_CASE("conflicting updates are inconsistent") {
    auto spec = parse(
        "asm C\nsignature:\n    domain D subsetof Integer\n    controlled x: D\ndefinitions:\n    domain D = {0 : 3}\n"
        "    main rule r_Main = par x := 1 x := 2 endpar\ndefault init s0:\n    function x = 0\n");
    auto m = Machine::create(spec);
    try {
        m->compute_update_set(m->initial_states().front());
        FAIL("expected an inconsistent update");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InconsistentUpdate);
    }
}

TEST_CASE("equal duplicate updates are consistent") {
    UpdateSet u;
    u.add(0, Value::integer(1), "x");
    CHECK_NOTHROW(u.add(0, Value::integer(1), "x"));
    CHECK_THROWS_AS(u.add(0, Value::integer(2), "x"), Error);
}

TEST_CASE("successors cross the update with every monitored value") {
    auto m = clock_machine();
    auto next = m->successors(clock_state(*m, 0, 0, 0, true));
    REQUIRE(next.size() == 2);
    CHECK(next[0] == clock_state(*m, 1, 0, 0, false));
    CHECK(next[1] == clock_state(*m, 1, 0, 0, true));
    auto idle = m->successors(clock_state(*m, 0, 0, 0, false));
    REQUIRE(idle.size() == 2);
    CHECK(idle[0] == clock_state(*m, 0, 0, 0, false));
    CHECK(idle[1] == clock_state(*m, 0, 0, 0, true));
}

TEST_CASE("a system with no effect has itself as only successor") {
    auto spec = load_model("Stuck.asm");
    auto init = initial_states(spec);
    REQUIRE(init.size() == 1);
    auto next = successors(spec, init[0]);
    REQUIRE(next.size() == 1);
    CHECK(next[0] == init[0]);
}

TEST_CASE("clock successors agree with the hand-written clock") {
    auto m = clock_machine();
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> s60(0, 59), s24(0, 23);
    for (int i = 0; i < 500; ++i) {
        oracle::ClockState c{s60(rng), s60(rng), s24(rng), (i % 2) == 0};
        auto next = m->successors(clock_state(*m, c.sec, c.min, c.h, c.signal));
        REQUIRE(next.size() == 2);
        for (bool sig : {false, true}) {
            auto o = oracle::clock_next(c, sig);
            CHECK(next[sig ? 1 : 0] == clock_state(*m, o.sec, o.min, o.h, o.signal));
        }
    }
}

TEST_CASE("frame property and branch count on the traffic light") {
    auto m = Machine::create(load_model("TrafficLight.asm"));
    std::vector<State> frontier = m->initial_states();
    std::size_t monitored_product = m->monitored_valuations().size();
    CHECK(monitored_product == 2);
    for (int depth = 0; depth < 6; ++depth) {
        std::vector<State> next;
        for (const auto& s : frontier) {
            auto u = m->compute_update_set(s);
            auto succ = m->successors(s);
            CHECK(succ.size() == monitored_product);
            for (const auto& t : succ) {
                for (std::size_t slot = 0; slot < m->layout().controlled_count(); ++slot) {
                    if (!u.get(slot)) CHECK(t.values[slot] == s.values[slot]);
                    CHECK(m->layout().slot(slot).domain->contains(t.values[slot]));
                }
                next.push_back(t);
            }
        }
        frontier = std::move(next);
    }
}

TEST_CASE("fixed monitored inputs give one controlled trajectory") {
    auto m = clock_machine();
    std::mt19937 rng(11);
    std::vector<bool> inputs(200);
    for (auto&& b : inputs) b = std::bernoulli_distribution(0.7)(rng);
    auto run = [&] {
        State s = m->with_monitored(m->default_initial_state(), {Value::boolean(inputs[0])});
        for (std::size_t i = 1; i < inputs.size(); ++i)
            s = m->with_monitored(m->apply(s, m->compute_update_set(s)), {Value::boolean(inputs[i])});
        return s;
    };
    CHECK(run() == run());
}

TEST_CASE("clock scenario passes after two steps") {
    auto r = clock_machine()->run_scenario(testing::load_scenario("ClockScenario.avalla"));
    CHECK(r.passed);
    CHECK(r.steps_executed == 2);
    CHECK(r.trace.size() == 3);
}

TEST_CASE("a wrong expectation names the failing check") {
    std::string text = model_text("ClockScenario.avalla");
    auto pos = text.rfind("sec = 1");
    text.replace(pos, 7, "sec = 2");
    auto r = clock_machine()->run_scenario(scenario(text));
    CHECK_FALSE(r.passed);
    REQUIRE(r.failed_check.has_value());
    CHECK(r.failed_check->command_index == 5);
    CHECK(r.failed_check->actual_text.find("sec=1") != std::string::npos);
}

TEST_CASE("setting a controlled location is refused") {
    try {
        clock_machine()->run_scenario(scenario("scenario S\nload Clock.asm\nset sec := 1;\nstep;\n"));
        FAIL("expected set-to-controlled");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SetToControlled);
    }
}

TEST_CASE("set values must lie in the domain") {
    auto spec = load_model("TrafficLight.asm");
    try {
        run_scenario(spec, scenario("scenario S\nload T.asm\nset go := 3;\nstep;\n"));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SetOutOfDomain);
    } catch (const DiagnosticsError&) {
    }
}

TEST_CASE("unary functions and derived values evaluate") {
    auto m = Machine::create(load_model("TrafficLight.asm"));
    auto r = m->run_scenario(scenario(
        "scenario S\nload T.asm\nset go := true;\ncheck waiting = false;\nstep;\n"
        "check light = GREEN and seen(RED) and not seen(GREEN) and timer = 0;\n"));
    CHECK(r.passed);
}

TEST_CASE("mod is never negative") {
    auto spec = parse(
        "asm M\nsignature:\n    domain D subsetof Integer\n    controlled x: D\ndefinitions:\n    domain D = {0 : 4}\n"
        "    main rule r_Main = x := (x - 1) mod 5\ndefault init s0:\n    function x = 0\n");
    auto m = Machine::create(spec);
    auto next = m->successors(m->initial_states().front());
    REQUIRE(next.size() == 1);
    CHECK(next[0].values[0] == Value::integer(4));
}

TEST_CASE("leaving the domain is a violation") {
    auto spec = parse(
        "asm M\nsignature:\n    domain D subsetof Integer\n    controlled x: D\ndefinitions:\n    domain D = {0 : 4}\n"
        "    main rule r_Main = x := x + 1\ndefault init s0:\n    function x = 4\n");
    auto m = Machine::create(spec);
    try {
        m->successors(m->initial_states().front());
        FAIL("expected a domain violation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DomainViolation);
    }
}

}  // TEST_SUITE
