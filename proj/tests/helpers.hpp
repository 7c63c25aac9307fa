#pragma once

#include <filesystem>
#include <string>

#include <unistd.h>

#include "asmprop/diagnostics.hpp"
#include "asmprop/files.hpp"
#include "asmprop/syntax.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return ASMPROP_SOURCE_DIR; }
inline std::filesystem::path model_path(const std::string& name) { return source_dir() / "models" / name; }
inline std::filesystem::path fixture_dir(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }
inline std::filesystem::path prompt_dir() { return source_dir() / "prompts"; }

inline std::string model_text(const std::string& name) { return asmprop::read_text_file(model_path(name)); }

inline asmprop::AsmSpecification load_model(const std::string& name) {
    auto r = asmprop::parse_asm(model_text(name));
    if (!r) throw asmprop::DiagnosticsError(r.diagnostics());
    return std::move(r).value();
}

inline asmprop::AvallaScenario load_scenario(const std::string& name) {
    auto r = asmprop::parse_avalla(model_text(name));
    if (!r) throw asmprop::DiagnosticsError(r.diagnostics());
    return std::move(r).value();
}

inline asmprop::Formula ctl(const std::string& text) {
    auto r = asmprop::parse_property(text, asmprop::Logic::CTL, true);
    if (!r) throw asmprop::DiagnosticsError(r.diagnostics());
    return std::move(r).value();
}

inline asmprop::Formula ltl(const std::string& text) {
    auto r = asmprop::parse_property(text, asmprop::Logic::LTL, true);
    if (!r) throw asmprop::DiagnosticsError(r.diagnostics());
    return std::move(r).value();
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("asmprop-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
