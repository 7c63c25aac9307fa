#include "asmprop/ears.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "asmprop/diagnostics.hpp"

namespace asmprop {

const char* to_string(EarsPattern pattern) {
    switch (pattern) {
        case EarsPattern::Ubiquitous: return "ubiquitous";
        case EarsPattern::EventDriven: return "event-driven";
        case EarsPattern::StateDriven: return "state-driven";
        case EarsPattern::OptionalFeature: return "optional-feature";
        case EarsPattern::UnwantedBehavior: return "unwanted-behavior";
        case EarsPattern::Complex: return "complex";
    }
    return "?";
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool starts_with_word(const std::string& lowered, const char* word) {
    const std::string w = std::string(word) + " ";
    return lowered.rfind(w, 0) == 0;
}

/// Clause keywords that open a condition after a comma, e.g. "..., when x, ...".
int later_triggers(const std::string& lowered) {
    int n = 0;
    for (const char* kw : {", when ", ", while ", ", where ", ", if "}) {
        for (auto pos = lowered.find(kw); pos != std::string::npos; pos = lowered.find(kw, pos + 1)) ++n;
    }
    return n;
}

void split_response(EarsRequirement& r, const std::string& clause) {
    std::string lowered = lower(clause);
    auto shall = lowered.find(" shall ");
    if (shall != std::string::npos) {
        r.system_name = trim(clause.substr(0, shall));
        r.response = trim(clause.substr(shall + 7));
    } else {
        r.response = trim(clause);
    }
}

}  // namespace

EarsRequirement classify_ears(std::string_view text) {
    EarsRequirement r;
    r.raw = trim(text);
    if (r.raw.empty()) throw Error(ErrorKind::Precondition, "requirement text is empty");
    std::string body = r.raw;
    while (!body.empty() && body.back() == '.') body.pop_back();
    const std::string lowered = lower(body);

    auto clause_after = [&](std::size_t keyword_len) -> std::pair<std::string, std::string> {
        auto comma = body.find(',', keyword_len);
        if (comma == std::string::npos) return {trim(body.substr(keyword_len)), {}};
        return {trim(body.substr(keyword_len, comma - keyword_len)), body.substr(comma + 1)};
    };

    if (starts_with_word(lowered, "when")) {
        r.pattern = EarsPattern::EventDriven;
        auto [cond, rest] = clause_after(5);
        r.trigger = cond;
        split_response(r, rest);
    } else if (starts_with_word(lowered, "while")) {
        r.pattern = EarsPattern::StateDriven;
        auto [cond, rest] = clause_after(6);
        r.precondition = cond;
        split_response(r, rest);
    } else if (starts_with_word(lowered, "where")) {
        r.pattern = EarsPattern::OptionalFeature;
        auto [cond, rest] = clause_after(6);
        r.precondition = cond;
        split_response(r, rest);
    } else if (starts_with_word(lowered, "if") && lowered.find(" then ") != std::string::npos) {
        r.pattern = EarsPattern::UnwantedBehavior;
        auto then = lowered.find(" then ");
        r.trigger = trim(body.substr(3, then - 3));
        if (!r.trigger.empty() && r.trigger.back() == ',') r.trigger.pop_back();
        split_response(r, body.substr(then + 6));
    } else if (lowered.find(" shall ") != std::string::npos) {
        r.pattern = EarsPattern::Ubiquitous;
        split_response(r, body);
        return r;
    } else {
        r.pattern = EarsPattern::Ubiquitous;
        r.recognized = false;
        r.response = body;
        return r;
    }
    if (later_triggers(lowered) > 0) r.pattern = EarsPattern::Complex;
    return r;
}

}  // namespace asmprop
