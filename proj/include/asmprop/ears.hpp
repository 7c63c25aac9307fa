#pragma once

#include <string>
#include <string_view>

namespace asmprop {

enum class EarsPattern { Ubiquitous, EventDriven, StateDriven, OptionalFeature, UnwantedBehavior, Complex };

const char* to_string(EarsPattern pattern);  // "event-driven", ...

struct EarsRequirement {
    EarsPattern pattern = EarsPattern::Ubiquitous;
    std::string trigger;       // When / If clause
    std::string precondition;  // While / Where clause
    std::string system_name;   // subject before "shall", when present
    std::string response;
    std::string raw;
    bool recognized = true;  // false: no EARS keyword, classified as ubiquitous
};

/// Keyword-driven classification. Throws Precondition on blank text.
EarsRequirement classify_ears(std::string_view text);

}  // namespace asmprop
