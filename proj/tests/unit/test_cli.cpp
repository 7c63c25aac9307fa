#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "../../tools/cli.hpp"
#include "asmprop/syntax.hpp"
#include "helpers.hpp"

using namespace asmprop;
using namespace asmprop::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

struct Harness {
    testing::TempDir dir;
    std::map<std::string, std::string> env;

    Outcome run(std::vector<std::string> args, const std::string& input = {}) {
        args.insert(args.begin(), {"--transcripts-dir", (dir / "transcripts").string(), "--prompt-dir",
                                   testing::prompt_dir().string()});
        std::istringstream in(input);
        std::ostringstream out, err;
        Getenv getenv = [this](const char* name) -> const char* {
            auto it = env.find(name);
            return it == env.end() ? nullptr : it->second.c_str();
        };
        int code = cli::run(args, {in, out, err}, getenv);
        return {code, out.str(), err.str()};
    }

    std::size_t transcripts() const {
        std::size_t n = 0;
        if (std::filesystem::exists(dir / "transcripts"))
            for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "transcripts")) ++n;
        return n;
    }
};

std::string model(const std::string& name) { return testing::model_path(name).string(); }
std::string fixtures(const std::string& name) { return testing::fixture_dir(name).string(); }

const std::string kRequirement = "When the min function reaches the value 59, it is set to 0 in the next state";

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
    std::size_t n = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        line.erase(0, line.find_first_not_of(' '));
        if (line.rfind(prefix, 0) == 0) ++n;
    }
    return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(ErrorKind::Io) == kUsage);
    CHECK(exit_code_for(ErrorKind::Network) == kBackend);
    CHECK(exit_code_for(ErrorKind::HttpStatus) == kBackend);
    CHECK(exit_code_for(ErrorKind::FixtureExhausted) == kBackend);
    CHECK(exit_code_for(ErrorKind::UnparseableResponse) == kBackend);
    CHECK(exit_code_for(ErrorKind::RepairBudgetExhausted) == kFails);
    CHECK(exit_code_for(ErrorKind::StateLimitExceeded) == kLimit);
    CHECK(exit_code_for(ErrorKind::Cancelled) == kLimit);
}

TEST_CASE("usage errors") {
    Harness h;
    CHECK(h.run({}).code == kUsage);
    CHECK(h.run({"check"}).code == kUsage);
    CHECK(h.run({"check", "/no/such/file.asm"}).code == kUsage);
    CHECK(h.run({"frobnicate", model("Clock.asm")}).code == kUsage);
    CHECK(h.run({"--help"}).code == kSuccess);
}

TEST_CASE("syntax errors are reported with a position") {
    Harness h;
    std::ofstream(h.dir / "Broken.asm") << "asm Broken\nsignature:\n  controlled x : Boolean\n";
    auto r = h.run({"check", (h.dir / "Broken.asm").string()});
    CHECK(r.code == kUsage);
    CHECK(r.err.find("Broken.asm:") != std::string::npos);
}

TEST_CASE("run-scenario passes on the clock scenario") {
    Harness h;
    auto r = h.run({"run-scenario", model("Clock.asm"), model("ClockScenario.avalla")});
    CHECK(r.code == kSuccess);
    CHECK(r.out.find("passed") == 0);
}

TEST_CASE("check reports verdicts and evidence") {
    Harness h;
    auto r = h.run({"check", model("TrafficLight.asm")});
    CHECK(r.code == kFails);
    CHECK(count_lines_starting(r.out, "[") == 7);
    CHECK(r.out.find("counterexample") != std::string::npos);

    auto ok = h.run({"check", model("Clock.asm"), "--property", "AG(min = 59 implies AX(min = 0))"});
    CHECK(ok.code == kFails);  // fails without signal and sec at 59
    auto holds = h.run({"check", model("Clock.asm"), "--property", "AG(sec >= 0 and sec <= 59)"});
    CHECK(holds.code == kSuccess);
    CHECK(holds.out.find("holds") != std::string::npos);
}

TEST_CASE("ill-typed extra properties are usage errors") {
    Harness h;
    auto r = h.run({"check", model("Clock.asm"), "--property", "AG(minute = 0)"});
    CHECK(r.code == kUsage);
    CHECK(r.err.find("did you mean 'min'") != std::string::npos);
}

TEST_CASE("state limits map to exit 4") {
    Harness h;
    auto r = h.run({"check", model("Clock.asm"), "--property", "AG(sec >= 0)", "--limit-states", "100"});
    CHECK(r.code == kLimit);
}

TEST_CASE("formalize writes one property and a transcript") {
    Harness h;
    const auto out = h.dir / "Enriched.asm";
    auto r = h.run({"formalize", model("Clock.asm"), "--req", kRequirement, "--out", out.string(), "--backend",
                    "replay", "--fixtures", fixtures("o2_formalize")});
    REQUIRE(r.code == kSuccess);
    CHECK(r.out.rfind("AG(min = 59 implies AX(min = 0))", 0) == 0);
    const std::string text = read_text_file(out);
    CHECK(count_lines_starting(text, "CTLSPEC") == 1);
    auto reparsed = parse_asm(text);
    REQUIRE(reparsed.ok());
    CHECK(reparsed.value().properties.size() == 1);
    CHECK(h.transcripts() == 1);
}

TEST_CASE("a failed formalize leaves an existing output untouched") {
    Harness h;
    const auto out = h.dir / "Keep.asm";
    std::ofstream(out) << "previous contents\n";
    auto r = h.run({"formalize", model("Clock.asm"), "--req", kRequirement, "--out", out.string(), "--backend",
                    "replay", "--fixtures", fixtures("repair_exhausted")});
    CHECK(r.code == kFails);
    CHECK(read_text_file(out) == "previous contents\n");
    CHECK(h.transcripts() == 1);
}

TEST_CASE("requirements may come from a file") {
    Harness h;
    std::ofstream(h.dir / "req.txt") << kRequirement << "\n";
    auto r = h.run({"formalize", model("Clock.asm"), "--req", "@" + (h.dir / "req.txt").string(), "--backend",
                    "replay", "--fixtures", fixtures("o2_formalize")});
    CHECK(r.code == kSuccess);
}

TEST_CASE("exhausted fixtures are backend errors") {
    Harness h;
    auto r = h.run({"elicit", model("Clock.asm"), "--count", "3", "--backend", "replay", "--fixtures",
                    fixtures("o2_formalize")});
    CHECK(r.code == kBackend);
}

TEST_CASE("missing fixture directories are usage errors") {
    Harness h;
    auto r = h.run({"elicit", model("Clock.asm"), "--backend", "replay", "--fixtures", (h.dir / "none").string()});
    CHECK(r.code == kUsage);
    CHECK(r.err.find("manifest.json") != std::string::npos);
}

TEST_CASE("elicit and explain print the completion") {
    Harness h;
    auto e = h.run({"elicit", model("Clock.asm"), "--count", "3", "--backend", "replay", "--fixtures",
                    fixtures("o1_elicit")});
    CHECK(e.code == kSuccess);
    CHECK(e.out.find("1. Time variables always stay within valid clock ranges\n") != std::string::npos);
    auto x = h.run({"explain-prop", model("Clock.asm"), "--formula", "AG(min = 59 implies AX(min = 0))", "--backend",
                    "replay", "--fixtures", fixtures("o3_explain")});
    CHECK(x.code == kSuccess);
    CHECK(x.out.rfind("In every reachable state", 0) == 0);
    CHECK(h.transcripts() == 2);
}

TEST_CASE("global options may follow the subcommand") {
    Harness h;
    auto r = h.run({"explain-scenario", model("Clock.asm"), model("ClockScenario.avalla"), "--backend", "replay",
                    "--fixtures", fixtures("o4_explain"), "--json"});
    REQUIRE(r.code == kSuccess);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "explain-scenario");
    CHECK(j["text"].get<std::string>().rfind("The scenario verifies", 0) == 0);
}

TEST_CASE("json errors carry the exit code") {
    Harness h;
    auto r = h.run({"--json", "check", model("Clock.asm"), "--property", "AG(minute = 0)"});
    CHECK(r.code == kUsage);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["properties"][0]["status"] == "ill-typed");
}

TEST_CASE("export-cex produces a replayable scenario") {
    Harness h;
    const auto out = h.dir / "cex.avalla";
    auto r = h.run({"export-cex", model("ClockProperties.asm"), "--property-index", "1", "--out", out.string()});
    REQUIRE(r.code == kSuccess);
    CHECK(h.run({"run-scenario", model("ClockProperties.asm"), out.string()}).code == kSuccess);
    CHECK(h.run({"export-cex", model("ClockProperties.asm"), "--property-index", "2", "--out", out.string()}).code ==
          kUsage);
    CHECK(h.run({"export-cex", model("ClockProperties.asm"), "--property-index", "9", "--out", out.string()}).code ==
          kUsage);
}

TEST_CASE("emit-smv writes the model") {
    Harness h;
    const auto out = h.dir / "clock.smv";
    auto r = h.run({"emit-smv", model("Clock.asm"), "--out", out.string()});
    CHECK(r.code == kSuccess);
    CHECK(read_text_file(out).find("\nMODULE main\n") != std::string::npos);
}

TEST_CASE("configuration precedence") {
    Harness h;
    std::ofstream(h.dir / "asmprop.toml") << "# settings\n[agent]\nmodel = \"from-file\"\nmax_iterations = 5\n"
                                             "endpoint = \"http://file\"\n";
    std::map<std::string, std::string> env = {{"ASMPROP_MODEL", "from-env"}};
    Getenv getenv = [&](const char* name) -> const char* {
        auto it = env.find(name);
        return it == env.end() ? nullptr : it->second.c_str();
    };
    Settings s = load_settings(h.dir / "asmprop.toml", true, getenv);
    CHECK(s.agent.model == "from-env");
    CHECK(s.agent.max_iterations == 5);
    CHECK(s.agent.endpoint == "http://file");
    CHECK(s.ltl_bound == 10);

    Settings d = load_settings(h.dir / "absent.toml", false, getenv);
    CHECK(d.agent.max_iterations == 3);
    CHECK_THROWS_AS(load_settings(h.dir / "absent.toml", true, getenv), Error);

    Settings bad;
    CHECK_THROWS_AS(apply_config_text(bad, "colour = blue\n", "x.toml"), Error);
    CHECK_THROWS_AS(apply_config_text(bad, "max_iterations = many\n", "x.toml"), Error);

    // flags beat the file: a budget of 1 stops the repair loop after one call
    auto r = h.run({"--config", (h.dir / "asmprop.toml").string(), "--max-iterations", "1", "formalize",
                    model("Clock.asm"), "--req", kRequirement, "--backend", "replay", "--fixtures",
                    fixtures("repair_success")});
    CHECK(r.code == kFails);
}

TEST_CASE("split words") {
    CHECK(split_words("check --property \"AG(min = 0)\"") ==
          std::vector<std::string>{"check", "--property", "AG(min = 0)"});
    CHECK(split_words("  a\\ b  c ") == std::vector<std::string>{"a b", "c"});
    CHECK(split_words("").empty());
    CHECK_THROWS_AS(split_words("\"open"), Error);
}

TEST_CASE("repl session formalizes and saves") {
    Harness h;
    const auto saved = h.dir / "Saved.asm";
    const std::string script = "props\nformalize --req \"" + kRequirement + "\"\nprops\n:save " + saved.string() +
                               "\nbogus\n:quit\n";
    auto r = h.run({"--backend", "replay", "--fixtures", fixtures("o2_formalize"), "repl", model("Clock.asm")}, script);
    CHECK(r.out.find("[1] CTLSPEC AG(min = 59 implies AX(min = 0))") != std::string::npos);
    const std::string text = read_text_file(saved);
    CHECK(count_lines_starting(text, "CTLSPEC") == 1);
    CHECK(parse_asm(text).ok());
}

TEST_CASE("repl warns about unsaved properties") {
    Harness h;
    auto r = h.run({"--backend", "replay", "--fixtures", fixtures("o2_formalize"), "repl", model("Clock.asm")},
                   "formalize --req \"" + kRequirement + "\"\n");
    CHECK(r.err.find("unsaved") != std::string::npos);
}

}  // TEST_SUITE
