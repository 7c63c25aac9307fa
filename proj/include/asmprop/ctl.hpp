#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asmprop/ast.hpp"

namespace asmprop {

/// Total transition relation in compressed adjacency form.
class TransitionGraph {
public:
    TransitionGraph() = default;
    explicit TransitionGraph(const std::vector<std::vector<std::uint32_t>>& adjacency);
    TransitionGraph(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> targets);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t transition_count() const { return targets_.size(); }
    std::span<const std::uint32_t> successors(std::size_t s) const {
        return {targets_.data() + offsets_[s], targets_.data() + offsets_[s + 1]};
    }
    std::span<const std::uint32_t> predecessors(std::size_t s) const;

private:
    void build_predecessors() const;

    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> targets_;
    mutable std::vector<std::uint32_t> pred_offsets_;
    mutable std::vector<std::uint32_t> pred_targets_;
};

using StateSet = std::vector<char>;
using AtomLabeler = std::function<StateSet(const Term&)>;

/// A path through a graph; with `loop_start` the last state's successor is
/// `states[*loop_start]`.
struct Path {
    std::vector<std::size_t> states;
    std::optional<std::size_t> loop_start;
};

/// Fixpoint labeling over the adequate basis {EX, EU, EG}, plus evidence
/// extraction for failing universal and holding existential formulas.
/// Not thread-safe: satisfying sets are memoized per subformula.
class CtlEngine {
public:
    CtlEngine(const TransitionGraph& graph, AtomLabeler labeler);

    /// Throws Precondition for LTL operators.
    const StateSet& sat(const Formula& f);

    /// Shortest path (multi-source BFS where it matters) from one of
    /// `sources` showing why `f` fails there. Every source must violate `f`.
    Path explain_false(const Formula& f, const std::vector<std::size_t>& sources);
    /// Path from one of `sources` showing why `f` holds there.
    Path explain_true(const Formula& f, const std::vector<std::size_t>& sources);

private:
    StateSet compute(const Formula& f);
    StateSet ex(const StateSet& p) const;
    StateSet eu(const StateSet& p, const StateSet& q) const;
    StateSet eg(const StateSet& p) const;

    Path bfs_to(const std::vector<std::size_t>& sources, const StateSet& through, const StateSet& target) const;
    Path lasso_within(std::size_t from, const StateSet& inside) const;
    Path extend(Path head, Path tail) const;

    const TransitionGraph& graph_;
    AtomLabeler labeler_;
    std::map<std::string, StateSet> memo_;
};

}  // namespace asmprop
