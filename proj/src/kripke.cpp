#include <cstring>

#include "asmprop/checker.hpp"
#include "asmprop/syntax.hpp"

namespace asmprop {

namespace {

std::string state_key(const State& s) {
    std::string key(s.values.size() * sizeof(std::int64_t), '\0');
    for (std::size_t i = 0; i < s.values.size(); ++i)
        std::memcpy(key.data() + i * sizeof(std::int64_t), &s.values[i].raw, sizeof(std::int64_t));
    return key;
}

}  // namespace

KripkeStructure::KripkeStructure(KripkeStructure&& other) noexcept
    : machine_(std::move(other.machine_)),
      states_(std::move(other.states_)),
      initial_(std::move(other.initial_)),
      parent_(std::move(other.parent_)),
      depth_(std::move(other.depth_)),
      graph_(std::move(other.graph_)),
      index_(std::move(other.index_)),
      build_seconds_(other.build_seconds_),
      atom_cache_(std::move(other.atom_cache_)) {}

std::optional<std::size_t> KripkeStructure::find(const State& s) const {
    auto it = index_.find(state_key(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const StateSet& KripkeStructure::atom(const Term& term) const {
    std::lock_guard lock(atom_mutex_);
    std::string key = print_term(term);
    auto it = atom_cache_.find(key);
    if (it != atom_cache_.end()) return it->second;
    StateSet set(states_.size(), 0);
    for (std::size_t i = 0; i < states_.size(); ++i) set[i] = machine_->holds(term, states_[i]) ? 1 : 0;
    return atom_cache_.emplace(std::move(key), std::move(set)).first->second;
}

KripkeStructure build_kripke(std::shared_ptr<const Machine> machine, const Limits& limits) {
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    KripkeStructure ks;
    ks.machine_ = machine;
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> targets;

    auto intern = [&](State s, std::uint32_t parent, std::uint32_t depth) -> std::uint32_t {
        std::string key = state_key(s);
        auto it = ks.index_.find(key);
        if (it != ks.index_.end()) return it->second;
        if (ks.states_.size() >= limits.max_states)
            throw Error(ErrorKind::StateLimitExceeded,
                        "state-limit-exceeded: more than " + std::to_string(limits.max_states) +
                            " reachable states");
        auto index = static_cast<std::uint32_t>(ks.states_.size());
        ks.index_.emplace(std::move(key), index);
        ks.states_.push_back(std::move(s));
        ks.parent_.push_back(parent);
        ks.depth_.push_back(depth);
        return index;
    };

    for (auto& s : machine->initial_states()) {
        auto before = ks.states_.size();
        auto index = intern(std::move(s), KripkeStructure::kNoParent, 0);
        if (ks.states_.size() > before) ks.initial_.push_back(index);
    }

    for (std::size_t i = 0; i < ks.states_.size(); ++i) {
        if ((i & 0xff) == 0) {
            if (limits.cancel && limits.cancel->load()) throw Error(ErrorKind::Cancelled, "cancelled");
            if (Clock::now() - started > limits.max_time)
                throw Error(ErrorKind::TimeLimitExceeded,
                            "time-limit-exceeded after " + std::to_string(ks.states_.size()) + " states");
        }
        std::vector<State> next;
        try {
            next = machine->successors(ks.states_[i]);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " in state {" + machine->format_state(ks.states_[i]) + "}");
        }
        for (auto& t : next)
            targets.push_back(intern(std::move(t), static_cast<std::uint32_t>(i), ks.depth_[i] + 1));
        offsets.push_back(static_cast<std::uint32_t>(targets.size()));
    }
    ks.graph_ = TransitionGraph(std::move(offsets), std::move(targets));
    ks.build_seconds_ = std::chrono::duration<double>(Clock::now() - started).count();
    return ks;
}

KripkeStructure build_kripke(const AsmSpecification& spec, const Limits& limits) {
    return build_kripke(Machine::create(spec), limits);
}

}  // namespace asmprop
