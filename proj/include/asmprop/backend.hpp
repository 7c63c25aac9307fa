#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace asmprop {

enum class BackendKind { Live, Replay };

struct AgentConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key;
    double temperature = 0.0;
    int max_iterations = 3;
    std::chrono::milliseconds timeout{60'000};
    BackendKind backend = BackendKind::Live;
    std::filesystem::path fixtures;
    bool semantic_repair = false;

    /// Throws InvalidArgument when an invariant is broken.
    void validate() const;
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::size_t calls() const = 0;
};

/// Lowercase hex SHA-256 of the prompt text.
std::string prompt_digest(const std::string& prompt);

/// Scripted responses. Sequence mode hands them out in order; digest mode
/// looks each prompt up by prompt_digest.
class ReplayBackend : public CompletionBackend {
public:
    static std::unique_ptr<ReplayBackend> sequence(std::vector<std::string> responses);
    static std::unique_ptr<ReplayBackend> by_digest(std::map<std::string, std::string> responses);

    /// Reads `manifest.json` from the directory:
    ///   {"mode": "sequence", "responses": ["1.txt", "2.txt"]}
    ///   {"mode": "digest", "responses": {"<sha256>": "a.txt"}}
    /// A single trailing newline is stripped from every response file.
    static std::unique_ptr<ReplayBackend> load(const std::filesystem::path& directory);

    std::string complete(const std::string& prompt) override;
    std::size_t calls() const override { return calls_; }

private:
    bool by_digest_ = false;
    std::vector<std::string> sequence_;
    std::map<std::string, std::string> digests_;
    std::size_t next_ = 0;
    std::size_t calls_ = 0;
};

/// Chat-completions client. Throws Network (message names the endpoint) and
/// HttpStatus (message carries the response body).
class LiveBackend : public CompletionBackend {
public:
    explicit LiveBackend(AgentConfig config);

    std::string complete(const std::string& prompt) override;
    std::size_t calls() const override { return calls_; }

    /// Request body for one prompt; exposed for tests.
    std::string request_body(const std::string& prompt) const;
    /// First choice's message content. Throws UnparseableResponse.
    static std::string parse_response(const std::string& body);

private:
    AgentConfig config_;
    std::size_t calls_ = 0;
};

std::unique_ptr<CompletionBackend> make_backend(const AgentConfig& config);

}  // namespace asmprop
