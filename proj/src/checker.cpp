#include "asmprop/checker.hpp"

#include <functional>

#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

using Clock = std::chrono::steady_clock;

Trace to_trace(const KripkeStructure& ks, const Path& path) {
    Trace t;
    t.loop_start = path.loop_start;
    t.states.reserve(path.states.size());
    for (auto i : path.states) t.states.push_back(ks.state(i));
    return t;
}

Path parent_path(const KripkeStructure& ks, std::size_t target) {
    Path p;
    for (std::uint32_t cur = static_cast<std::uint32_t>(target); cur != KripkeStructure::kNoParent;
         cur = ks.parent(cur))
        p.states.push_back(cur);
    std::reverse(p.states.begin(), p.states.end());
    return p;
}

CheckStats stats_for(const KripkeStructure& ks, Clock::time_point started) {
    return {ks.size(), ks.graph().transition_count(),
            std::chrono::duration<double>(Clock::now() - started).count()};
}

bool existential_top(const Formula& f) {
    if (f.kind != FormulaKind::Temporal) return false;
    switch (f.temporal) {
        case TemporalOp::EF:
        case TemporalOp::EX:
        case TemporalOp::EU:
        case TemporalOp::EG:
            return true;
        default:
            return false;
    }
}

CtlEngine engine_for(const KripkeStructure& ks) {
    return CtlEngine(ks.graph(), [&ks](const Term& t) { return ks.atom(t); });
}

Verdict invariant_over(const KripkeStructure& ks, const StateSet& good, Clock::time_point started) {
    Verdict v;
    v.holds = true;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (good[i]) continue;
        v.holds = false;
        v.evidence_kind = EvidenceKind::Counterexample;
        v.evidence = to_trace(ks, parent_path(ks, i));
        break;
    }
    v.stats = stats_for(ks, started);
    return v;
}

}  // namespace

std::string Verdict::describe() const {
    if (!holds) return "fails";
    if (!exact) return "no violation up to bound " + std::to_string(bound.value_or(0));
    return "holds";
}

Verdict check_ctl(const KripkeStructure& ks, const TypedFormula& formula) {
    if (formula.logic != Logic::CTL)
        throw Error(ErrorKind::Precondition, "check_ctl needs a CTL formula");
    const auto started = Clock::now();
    CtlEngine engine = engine_for(ks);
    const StateSet& sat = engine.sat(formula.formula);
    std::vector<std::size_t> failing;
    for (auto i : ks.initial())
        if (!sat[i]) failing.push_back(i);

    Verdict v;
    v.holds = failing.empty();
    if (!v.holds) {
        v.evidence_kind = EvidenceKind::Counterexample;
        v.evidence = to_trace(ks, engine.explain_false(formula.formula, failing));
    } else if (existential_top(formula.formula)) {
        v.evidence_kind = EvidenceKind::Witness;
        v.evidence = to_trace(ks, engine.explain_true(formula.formula, ks.initial()));
    }
    v.stats = stats_for(ks, started);
    return v;
}

Verdict check_invariant(const KripkeStructure& ks, const Term& condition) {
    const auto started = Clock::now();
    return invariant_over(ks, ks.atom(condition), started);
}

bool ltl_holds_on_lasso(const Formula& f, std::size_t length, std::size_t loop_start,
                        const std::function<bool(const Term&, std::size_t)>& label_atom) {
    auto next = [&](std::size_t i) { return i + 1 < length ? i + 1 : loop_start; };
    std::function<std::vector<char>(const Formula&)> eval = [&](const Formula& g) {
        std::vector<char> out(length, 0);
        switch (g.kind) {
            case FormulaKind::Atom:
                for (std::size_t i = 0; i < length; ++i) out[i] = label_atom(g.atom, i);
                return out;
            case FormulaKind::Not: {
                auto a = eval(g.operands[0]);
                for (std::size_t i = 0; i < length; ++i) out[i] = !a[i];
                return out;
            }
            case FormulaKind::And:
            case FormulaKind::Or:
            case FormulaKind::Implies:
            case FormulaKind::Iff: {
                auto a = eval(g.operands[0]);
                auto b = eval(g.operands[1]);
                for (std::size_t i = 0; i < length; ++i) {
                    const bool x = a[i], y = b[i];
                    out[i] = g.kind == FormulaKind::And       ? x && y
                             : g.kind == FormulaKind::Or      ? x || y
                             : g.kind == FormulaKind::Implies ? !x || y
                                                              : x == y;
                }
                return out;
            }
            case FormulaKind::Temporal:
                break;
        }
        auto p = eval(g.operands[0]);
        switch (g.temporal) {
            case TemporalOp::X:
                for (std::size_t i = 0; i < length; ++i) out[i] = p[next(i)];
                return out;
            case TemporalOp::G:
            case TemporalOp::F:
            case TemporalOp::U: {
                std::vector<char> q;
                if (g.temporal == TemporalOp::U) q = eval(g.operands[1]);
                const bool greatest = g.temporal == TemporalOp::G;
                std::fill(out.begin(), out.end(), greatest ? 1 : 0);
                for (bool changed = true; changed;) {
                    changed = false;
                    for (std::size_t k = length; k-- > 0;) {
                        const bool after = out[next(k)];
                        bool value = false;
                        if (g.temporal == TemporalOp::G) value = p[k] && after;
                        else if (g.temporal == TemporalOp::F) value = p[k] || after;
                        else value = q[k] || (p[k] && after);
                        if (value != static_cast<bool>(out[k])) {
                            out[k] = value;
                            changed = true;
                        }
                    }
                }
                return out;
            }
            default:
                throw Error(ErrorKind::Precondition,
                            std::string("CTL operator ") + operator_name(g.temporal) + " in an LTL check");
        }
    };
    return eval(f)[0] != 0;
}

Verdict check_ltl_bounded(const KripkeStructure& ks, const TypedFormula& formula, int bound) {
    if (bound <= 0) throw Error(ErrorKind::InvalidArgument, "LTL bound must be positive");
    if (formula.logic != Logic::LTL)
        throw Error(ErrorKind::Precondition, "check_ltl_bounded needs an LTL formula");
    const auto started = Clock::now();
    const Formula& f = formula.formula;

    // G(state formula) and plain state formulas are decided exactly.
    if (f.kind == FormulaKind::Temporal && f.temporal == TemporalOp::G && f.operands[0].is_state_formula()) {
        CtlEngine engine = engine_for(ks);
        return invariant_over(ks, engine.sat(f.operands[0]), started);
    }
    if (f.is_state_formula()) {
        CtlEngine engine = engine_for(ks);
        const StateSet& sat = engine.sat(f);
        Verdict v;
        v.holds = true;
        for (auto i : ks.initial())
            if (!sat[i]) {
                v.holds = false;
                v.evidence_kind = EvidenceKind::Counterexample;
                v.evidence = to_trace(ks, Path{{i}, std::nullopt});
                break;
            }
        v.stats = stats_for(ks, started);
        return v;
    }

    // Iterative deepening over lassos of exactly `length` states, so the first
    // violation found is a shortest one.
    constexpr std::size_t kWorkBudget = 5'000'000;
    std::size_t work = 0;
    int completed = 0;
    auto label = [&](const std::vector<std::size_t>& path) {
        return [&ks, &path](const Term& t, std::size_t pos) { return ks.atom(t)[path[pos]] != 0; };
    };
    std::optional<Path> violation;
    std::vector<std::size_t> path;
    std::function<bool(std::size_t)> dfs = [&](std::size_t length) -> bool {
        if (++work > kWorkBudget) return false;
        const std::size_t last = path.back();
        if (path.size() == length) {
            for (auto t : ks.graph().successors(last)) {
                for (std::size_t j = 0; j < path.size(); ++j) {
                    if (path[j] != t) continue;
                    if (!ltl_holds_on_lasso(f, path.size(), j, label(path))) {
                        violation = Path{path, j};
                        return true;
                    }
                }
            }
            return false;
        }
        for (auto t : ks.graph().successors(last)) {
            path.push_back(t);
            bool found = dfs(length);
            path.pop_back();
            if (found || work > kWorkBudget) return found;
        }
        return false;
    };
    for (int length = 1; length <= bound && !violation && work <= kWorkBudget; ++length) {
        for (auto init : ks.initial()) {
            path.assign(1, init);
            if (dfs(static_cast<std::size_t>(length))) break;
            if (work > kWorkBudget) break;
        }
        if (!violation && work <= kWorkBudget) completed = length;
    }

    Verdict v;
    v.stats = stats_for(ks, started);
    if (violation) {
        v.holds = false;
        v.evidence_kind = EvidenceKind::Counterexample;
        v.evidence = to_trace(ks, *violation);
        return v;
    }
    v.holds = true;
    v.exact = false;
    v.bound = completed;
    return v;
}

Verdict check_property(const KripkeStructure& ks, const TypedFormula& formula, int ltl_bound) {
    return formula.logic == Logic::CTL ? check_ctl(ks, formula) : check_ltl_bounded(ks, formula, ltl_bound);
}

std::vector<PropertyVerdict> verify_spec(const AsmSpecification& spec, const Limits& limits, int ltl_bound) {
    std::vector<PropertyVerdict> out;
    for (const auto& p : spec.properties) out.push_back({p, std::nullopt, {}, std::nullopt});
    if (out.empty()) return out;

    // Properties are checked one by one so a bad one cannot block the rest.
    AsmSpecification model = spec;
    model.properties.clear();
    std::optional<KripkeStructure> ks;
    std::string build_error;
    try {
        ks.emplace(build_kripke(Machine::create(model), limits));
    } catch (const DiagnosticsError& e) {
        build_error = e.what();
    } catch (const Error& e) {
        build_error = e.what();
    }
    for (auto& entry : out) {
        if (!ks) {
            entry.error = build_error;
            continue;
        }
        auto typed = typecheck_formula(entry.property.formula, entry.property.logic, ks->machine().signature());
        if (!typed) {
            entry.diagnostics = typed.diagnostics();
            continue;
        }
        try {
            entry.verdict = check_property(*ks, *typed, ltl_bound);
        } catch (const Error& e) {
            entry.error = e.what();
        }
    }
    return out;
}

}  // namespace asmprop
