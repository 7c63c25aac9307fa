#include "asmprop/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "asmprop/diagnostics.hpp"
#include "asmprop/files.hpp"

#ifndef ASMPROP_DEFAULT_PROMPT_DIR
#define ASMPROP_DEFAULT_PROMPT_DIR "prompts"
#endif

namespace asmprop {

const char* to_string(PromptTask task) {
    switch (task) {
        case PromptTask::Elicit: return "elicit";
        case PromptTask::Formalize: return "formalize";
        case PromptTask::ExplainFormula: return "explain_formula";
        case PromptTask::ExplainScenario: return "explain_scenario";
        case PromptTask::Repair: return "repair";
    }
    return "?";
}

const std::vector<std::string>& allowed_placeholders() {
    static const std::vector<std::string> names = {"spec_text",     "signature_summary", "requirement",
                                                   "formula_text",  "scenario_text",     "diagnostics",
                                                   "logic",         "count"};
    return names;
}

namespace {

struct Slot {
    std::size_t begin, end;  // covers the braces
    std::string name;
};

std::vector<Slot> scan(const std::string& body) {
    std::vector<Slot> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        std::size_t j = i + 1;
        while (j < body.size() && (std::islower(static_cast<unsigned char>(body[j])) || body[j] == '_')) ++j;
        if (j < body.size() && body[j] == '}' && j > i + 1) {
            out.push_back({i, j + 1, body.substr(i + 1, j - i - 1)});
            i = j;
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> out;
    for (const auto& s : scan(body))
        if (std::find(out.begin(), out.end(), s.name) == out.end()) out.push_back(s.name);
    return out;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
    std::string out;
    std::size_t at = 0;
    for (const auto& s : scan(body)) {
        auto it = bindings.find(s.name);
        if (it == bindings.end())
            throw Error(ErrorKind::Precondition,
                        std::string("prompt template '") + to_string(task) + "' needs a value for {" + s.name + "}");
        out.append(body, at, s.begin - at);
        out += it->second;
        at = s.end;
    }
    out.append(body, at, std::string::npos);
    return out;
}

PromptLibrary PromptLibrary::from_templates(std::vector<PromptTemplate> templates) {
    PromptLibrary lib;
    const auto& allowed = allowed_placeholders();
    for (auto& t : templates) {
        for (const auto& name : t.placeholders())
            if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
                throw Error(ErrorKind::InvalidArgument,
                            std::string("prompt template '") + to_string(t.task) + "' uses unknown placeholder {" +
                                name + "}");
        lib.templates_[t.task] = std::move(t);
    }
    return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& directory) {
    std::vector<PromptTemplate> templates;
    for (auto task : {PromptTask::Elicit, PromptTask::Formalize, PromptTask::ExplainFormula,
                      PromptTask::ExplainScenario, PromptTask::Repair}) {
        templates.push_back({task, read_text_file(directory / (std::string(to_string(task)) + ".txt"))});
    }
    return from_templates(std::move(templates));
}

const PromptTemplate& PromptLibrary::get(PromptTask task) const {
    auto it = templates_.find(task);
    if (it == templates_.end())
        throw Error(ErrorKind::Precondition, std::string("no prompt template for '") + to_string(task) + "'");
    return it->second;
}

std::filesystem::path default_prompt_dir() {
    if (const char* env = std::getenv("ASMPROP_PROMPT_DIR"); env && *env) return env;
    return ASMPROP_DEFAULT_PROMPT_DIR;
}

}  // namespace asmprop
