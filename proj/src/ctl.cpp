#include "asmprop/ctl.hpp"

#include <algorithm>
#include <deque>

#include "asmprop/diagnostics.hpp"
#include "asmprop/syntax.hpp"

namespace asmprop {

TransitionGraph::TransitionGraph(const std::vector<std::vector<std::uint32_t>>& adjacency) {
    offsets_.reserve(adjacency.size() + 1);
    offsets_.push_back(0);
    for (const auto& succ : adjacency) {
        targets_.insert(targets_.end(), succ.begin(), succ.end());
        offsets_.push_back(static_cast<std::uint32_t>(targets_.size()));
    }
}

TransitionGraph::TransitionGraph(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {}

void TransitionGraph::build_predecessors() const {
    const std::size_t n = size();
    pred_offsets_.assign(n + 1, 0);
    for (auto t : targets_) ++pred_offsets_[t + 1];
    for (std::size_t i = 0; i < n; ++i) pred_offsets_[i + 1] += pred_offsets_[i];
    pred_targets_.resize(targets_.size());
    std::vector<std::uint32_t> fill(pred_offsets_.begin(), pred_offsets_.end() - 1);
    for (std::size_t s = 0; s < n; ++s)
        for (auto t : successors(s)) pred_targets_[fill[t]++] = static_cast<std::uint32_t>(s);
}

std::span<const std::uint32_t> TransitionGraph::predecessors(std::size_t s) const {
    if (pred_offsets_.size() != offsets_.size()) build_predecessors();
    return {pred_targets_.data() + pred_offsets_[s], pred_targets_.data() + pred_offsets_[s + 1]};
}

namespace {

StateSet negate(const StateSet& a) {
    StateSet out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = !a[i];
    return out;
}

StateSet combine(const StateSet& a, const StateSet& b, FormulaKind kind) {
    StateSet out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        switch (kind) {
            case FormulaKind::And: out[i] = a[i] && b[i]; break;
            case FormulaKind::Or: out[i] = a[i] || b[i]; break;
            case FormulaKind::Implies: out[i] = !a[i] || b[i]; break;
            default: out[i] = (a[i] != 0) == (b[i] != 0); break;
        }
    }
    return out;
}

std::vector<std::size_t> filter(const std::vector<std::size_t>& sources, const StateSet& set, bool member) {
    std::vector<std::size_t> out;
    for (auto s : sources)
        if ((set[s] != 0) == member) out.push_back(s);
    return out;
}

}  // namespace

CtlEngine::CtlEngine(const TransitionGraph& graph, AtomLabeler labeler)
    : graph_(graph), labeler_(std::move(labeler)) {}

const StateSet& CtlEngine::sat(const Formula& f) {
    std::string key = print_formula(f, FormulaStyle::CallStyle);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    StateSet value = compute(f);
    return memo_.emplace(std::move(key), std::move(value)).first->second;
}

StateSet CtlEngine::ex(const StateSet& p) const {
    StateSet out(graph_.size(), 0);
    for (std::size_t s = 0; s < graph_.size(); ++s)
        for (auto t : graph_.successors(s))
            if (p[t]) {
                out[s] = 1;
                break;
            }
    return out;
}

StateSet CtlEngine::eu(const StateSet& p, const StateSet& q) const {
    StateSet out = q;
    std::deque<std::size_t> work;
    for (std::size_t s = 0; s < q.size(); ++s)
        if (q[s]) work.push_back(s);
    while (!work.empty()) {
        auto t = work.front();
        work.pop_front();
        for (auto s : graph_.predecessors(t)) {
            if (!out[s] && p[s]) {
                out[s] = 1;
                work.push_back(s);
            }
        }
    }
    return out;
}

StateSet CtlEngine::eg(const StateSet& p) const {
    // Peel off p-states without a successor inside the remaining set.
    StateSet out = p;
    std::vector<std::uint32_t> count(graph_.size(), 0);
    std::deque<std::size_t> dead;
    for (std::size_t s = 0; s < graph_.size(); ++s) {
        if (!out[s]) continue;
        for (auto t : graph_.successors(s))
            if (out[t]) ++count[s];
        if (count[s] == 0) dead.push_back(s);
    }
    while (!dead.empty()) {
        auto s = dead.front();
        dead.pop_front();
        if (!out[s]) continue;
        out[s] = 0;
        for (auto pre : graph_.predecessors(s)) {
            if (!out[pre]) continue;
            // One decrement per edge; duplicate edges were counted per edge too.
            if (--count[pre] == 0) dead.push_back(pre);
        }
    }
    return out;
}

StateSet CtlEngine::compute(const Formula& f) {
    const std::size_t n = graph_.size();
    switch (f.kind) {
        case FormulaKind::Atom: {
            StateSet s = labeler_(f.atom);
            s.resize(n, 0);
            return s;
        }
        case FormulaKind::Not:
            return negate(sat(f.operands[0]));
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
        case FormulaKind::Iff: {
            StateSet a = sat(f.operands[0]);
            return combine(a, sat(f.operands[1]), f.kind);
        }
        case FormulaKind::Temporal:
            break;
    }
    const StateSet all(n, 1);
    switch (f.temporal) {
        case TemporalOp::EX: return ex(sat(f.operands[0]));
        case TemporalOp::AX: return negate(ex(negate(sat(f.operands[0]))));
        case TemporalOp::EF: return eu(all, sat(f.operands[0]));
        case TemporalOp::AG: return negate(eu(all, negate(sat(f.operands[0]))));
        case TemporalOp::EG: return eg(sat(f.operands[0]));
        case TemporalOp::AF: return negate(eg(negate(sat(f.operands[0]))));
        case TemporalOp::EU: {
            StateSet p = sat(f.operands[0]);
            return eu(p, sat(f.operands[1]));
        }
        case TemporalOp::AU: {
            // A[p U q] = not (E[not q U (not p and not q)] or EG not q)
            StateSet nq = negate(sat(f.operands[1]));
            StateSet np = negate(sat(f.operands[0]));
            StateSet both = combine(np, nq, FormulaKind::And);
            return negate(combine(eu(nq, both), eg(nq), FormulaKind::Or));
        }
        default:
            throw Error(ErrorKind::Precondition,
                        std::string("LTL operator ") + operator_name(f.temporal) + " in a CTL check");
    }
}

Path CtlEngine::bfs_to(const std::vector<std::size_t>& sources, const StateSet& through,
                       const StateSet& target) const {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(graph_.size(), kNone);
    std::vector<char> seen(graph_.size(), 0);
    std::deque<std::size_t> queue;
    auto trace_back = [&](std::size_t t) {
        Path p;
        for (std::size_t cur = t; cur != kNone; cur = parent[cur]) p.states.push_back(cur);
        std::reverse(p.states.begin(), p.states.end());
        return p;
    };
    for (auto s : sources) {
        if (seen[s]) continue;
        if (target[s]) return trace_back(s);
        seen[s] = 1;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        if (!through[s]) continue;
        for (auto t : graph_.successors(s)) {
            if (seen[t]) continue;
            seen[t] = 1;
            parent[t] = s;
            if (target[t]) return trace_back(t);
            queue.push_back(t);
        }
    }
    return Path{{sources.front()}, std::nullopt};
}

Path CtlEngine::lasso_within(std::size_t from, const StateSet& inside) const {
    Path p;
    std::map<std::size_t, std::size_t> position;
    std::size_t cur = from;
    while (true) {
        position[cur] = p.states.size();
        p.states.push_back(cur);
        std::optional<std::size_t> next;
        for (auto t : graph_.successors(cur))
            if (inside[t]) {
                next = t;
                break;
            }
        if (!next) return p;  // not in the set after all; give the prefix
        auto it = position.find(*next);
        if (it != position.end()) {
            p.loop_start = it->second;
            return p;
        }
        cur = *next;
    }
}

Path CtlEngine::extend(Path head, Path tail) const {
    if (head.loop_start || tail.states.empty()) return head;
    const std::size_t offset = head.states.size() - 1;
    head.states.insert(head.states.end(), tail.states.begin() + 1, tail.states.end());
    if (tail.loop_start) head.loop_start = *tail.loop_start + offset;
    return head;
}

Path CtlEngine::explain_false(const Formula& f, const std::vector<std::size_t>& sources) {
    const std::size_t s = sources.front();
    const Path here{{s}, std::nullopt};
    switch (f.kind) {
        case FormulaKind::Atom:
        case FormulaKind::Iff:
            return here;
        case FormulaKind::Not:
            return explain_true(f.operands[0], sources);
        case FormulaKind::And: {
            auto lhs_fails = filter(sources, sat(f.operands[0]), false);
            if (!lhs_fails.empty()) return explain_false(f.operands[0], lhs_fails);
            return explain_false(f.operands[1], sources);
        }
        case FormulaKind::Or:
            if (f.operands[0].is_state_formula()) return explain_false(f.operands[1], sources);
            return explain_false(f.operands[0], sources);
        case FormulaKind::Implies:
            return explain_false(f.operands[1], sources);
        case FormulaKind::Temporal:
            break;
    }
    const std::size_t n = graph_.size();
    switch (f.temporal) {
        case TemporalOp::AG: {
            Path p = bfs_to(sources, StateSet(n, 1), negate(sat(f.operands[0])));
            return extend(p, explain_false(f.operands[0], {p.states.back()}));
        }
        case TemporalOp::AX: {
            const StateSet& inner = sat(f.operands[0]);
            for (auto t : graph_.successors(s))
                if (!inner[t]) return extend(Path{{s, t}, std::nullopt}, explain_false(f.operands[0], {t}));
            return here;
        }
        case TemporalOp::AF:
            return lasso_within(s, eg(negate(sat(f.operands[0]))));
        case TemporalOp::AU: {
            StateSet nq = negate(sat(f.operands[1]));
            StateSet both = combine(negate(sat(f.operands[0])), nq, FormulaKind::And);
            StateSet reach = eu(nq, both);
            auto finite = filter(sources, reach, true);
            if (!finite.empty()) return bfs_to(finite, nq, both);
            return lasso_within(s, eg(nq));
        }
        default:
            return here;
    }
}

Path CtlEngine::explain_true(const Formula& f, const std::vector<std::size_t>& sources) {
    const std::size_t s = sources.front();
    const Path here{{s}, std::nullopt};
    switch (f.kind) {
        case FormulaKind::Atom:
        case FormulaKind::Iff:
            return here;
        case FormulaKind::Not:
            return explain_false(f.operands[0], sources);
        case FormulaKind::And:
            if (f.operands[0].is_state_formula()) return explain_true(f.operands[1], sources);
            return explain_true(f.operands[0], sources);
        case FormulaKind::Or: {
            auto lhs_holds = filter(sources, sat(f.operands[0]), true);
            if (!lhs_holds.empty()) return explain_true(f.operands[0], lhs_holds);
            return explain_true(f.operands[1], sources);
        }
        case FormulaKind::Implies: {
            auto lhs_fails = filter(sources, sat(f.operands[0]), false);
            if (!lhs_fails.empty()) return explain_false(f.operands[0], lhs_fails);
            return explain_true(f.operands[1], sources);
        }
        case FormulaKind::Temporal:
            break;
    }
    const std::size_t n = graph_.size();
    switch (f.temporal) {
        case TemporalOp::EF: {
            Path p = bfs_to(sources, StateSet(n, 1), sat(f.operands[0]));
            return extend(p, explain_true(f.operands[0], {p.states.back()}));
        }
        case TemporalOp::EX: {
            const StateSet& inner = sat(f.operands[0]);
            for (auto t : graph_.successors(s))
                if (inner[t]) return extend(Path{{s, t}, std::nullopt}, explain_true(f.operands[0], {t}));
            return here;
        }
        case TemporalOp::EU: {
            StateSet p = sat(f.operands[0]);
            Path path = bfs_to(sources, p, sat(f.operands[1]));
            return extend(path, explain_true(f.operands[1], {path.states.back()}));
        }
        case TemporalOp::EG:
            return lasso_within(s, eg(sat(f.operands[0])));
        default:
            return here;
    }
}

}  // namespace asmprop
