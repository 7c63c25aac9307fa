#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "asmprop/ctl.hpp"
#include "asmprop/interpreter.hpp"
#include "asmprop/signature.hpp"

namespace asmprop {

struct Limits {
    std::size_t max_states = 2'000'000;
    std::chrono::milliseconds max_time{60'000};
    const std::atomic<bool>* cancel = nullptr;
};

/// Reachable state graph in BFS order. Immutable after construction apart
/// from the internally synchronized atom cache.
class KripkeStructure {
public:
    static constexpr std::uint32_t kNoParent = 0xffffffffu;

    const Machine& machine() const { return *machine_; }
    std::shared_ptr<const Machine> machine_ptr() const { return machine_; }

    std::size_t size() const { return states_.size(); }
    const State& state(std::size_t i) const { return states_[i]; }
    const std::vector<std::size_t>& initial() const { return initial_; }
    const TransitionGraph& graph() const { return graph_; }
    std::uint32_t parent(std::size_t i) const { return parent_[i]; }
    std::uint32_t depth(std::size_t i) const { return depth_[i]; }
    std::optional<std::size_t> find(const State& s) const;

    /// States satisfying a Boolean term, computed once per term.
    const StateSet& atom(const Term& term) const;

    double build_seconds() const { return build_seconds_; }

private:
    friend KripkeStructure build_kripke(std::shared_ptr<const Machine>, const Limits&);

    std::shared_ptr<const Machine> machine_;
    std::vector<State> states_;
    std::vector<std::size_t> initial_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> depth_;
    TransitionGraph graph_;
    std::unordered_map<std::string, std::uint32_t> index_;
    double build_seconds_ = 0;

    mutable std::mutex atom_mutex_;
    mutable std::map<std::string, StateSet> atom_cache_;

public:
    KripkeStructure() = default;
    KripkeStructure(KripkeStructure&& other) noexcept;
    KripkeStructure& operator=(KripkeStructure&&) = delete;
};

/// Throws StateLimitExceeded, TimeLimitExceeded, Cancelled, or interpreter
/// errors (with the offending state appended to the message).
KripkeStructure build_kripke(std::shared_ptr<const Machine> machine, const Limits& limits = {});
KripkeStructure build_kripke(const AsmSpecification& spec, const Limits& limits = {});

struct Trace {
    std::vector<State> states;
    std::optional<std::size_t> loop_start;  // lasso: last state's successor is states[*loop_start]

    bool is_lasso() const { return loop_start.has_value(); }
    std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

enum class EvidenceKind { None, Counterexample, Witness };

struct CheckStats {
    std::size_t states = 0;
    std::size_t transitions = 0;
    double seconds = 0;
};

struct Verdict {
    bool holds = false;
    bool exact = true;              // false: bounded LTL search found nothing up to `bound`
    std::optional<int> bound;
    EvidenceKind evidence_kind = EvidenceKind::None;
    std::optional<Trace> evidence;
    CheckStats stats;

    std::string describe() const;  // "holds", "fails", "no violation up to bound 10"
};

Verdict check_ctl(const KripkeStructure& ks, const TypedFormula& formula);
Verdict check_invariant(const KripkeStructure& ks, const Term& condition);
/// Throws InvalidArgument when bound <= 0.
Verdict check_ltl_bounded(const KripkeStructure& ks, const TypedFormula& formula, int bound = 10);

/// Exact LTL semantics on a lasso-shaped path (`loop_start` required) whose
/// positions are labeled by `label_atom(term, position)`.
bool ltl_holds_on_lasso(const Formula& f, std::size_t length, std::size_t loop_start,
                        const std::function<bool(const Term&, std::size_t)>& label_atom);

struct PropertyVerdict {
    PropertyDecl property;
    std::optional<Verdict> verdict;
    Diagnostics diagnostics;  // type errors of this property
    std::optional<std::string> error;  // build or check failure
};

std::vector<PropertyVerdict> verify_spec(const AsmSpecification& spec, const Limits& limits = {},
                                         int ltl_bound = 10);

/// Checks a single typed property of either logic.
Verdict check_property(const KripkeStructure& ks, const TypedFormula& formula, int ltl_bound = 10);

}  // namespace asmprop
