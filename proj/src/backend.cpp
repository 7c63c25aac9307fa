#include "asmprop/backend.hpp"

#include <cstdio>

#include <openssl/evp.h>

#include <json.hpp>

#include "asmprop/diagnostics.hpp"
#include "asmprop/files.hpp"

namespace asmprop {

void AgentConfig::validate() const {
    if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max iterations must be at least 1");
    if (!(temperature >= 0.0)) throw Error(ErrorKind::InvalidArgument, "temperature must be non-negative");
    if (timeout.count() <= 0) throw Error(ErrorKind::InvalidArgument, "timeout must be positive");
    if (backend == BackendKind::Replay && fixtures.empty())
        throw Error(ErrorKind::InvalidArgument, "replay backend needs a fixture directory");
}

std::string prompt_digest(const std::string& prompt) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(prompt.data(), prompt.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Precondition, "SHA-256 digest failed");
    std::string hex;
    hex.reserve(len * 2);
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::unique_ptr<ReplayBackend> ReplayBackend::sequence(std::vector<std::string> responses) {
    auto b = std::unique_ptr<ReplayBackend>(new ReplayBackend);
    b->sequence_ = std::move(responses);
    return b;
}

std::unique_ptr<ReplayBackend> ReplayBackend::by_digest(std::map<std::string, std::string> responses) {
    auto b = std::unique_ptr<ReplayBackend>(new ReplayBackend);
    b->by_digest_ = true;
    b->digests_ = std::move(responses);
    return b;
}

namespace {

std::string read_fixture(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return text;
}

}  // namespace

std::unique_ptr<ReplayBackend> ReplayBackend::load(const std::filesystem::path& directory) {
    const auto manifest_path = directory / "manifest.json";
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "malformed fixture manifest '" + manifest_path.string() + "': " + e.what());
    }
    const std::string mode = manifest.value("mode", "sequence");
    const auto& responses = manifest.contains("responses") ? manifest["responses"] : nlohmann::json();
    try {
        if (mode == "sequence" && responses.is_array()) {
            std::vector<std::string> seq;
            for (const auto& f : responses) seq.push_back(read_fixture(directory / f.get<std::string>()));
            return sequence(std::move(seq));
        }
        if (mode == "digest" && responses.is_object()) {
            std::map<std::string, std::string> map;
            for (const auto& [digest, f] : responses.items()) map[digest] = read_fixture(directory / f.get<std::string>());
            return by_digest(std::move(map));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "malformed fixture manifest '" + manifest_path.string() + "': " + e.what());
    }
    throw Error(ErrorKind::InvalidArgument,
                "fixture manifest '" + manifest_path.string() + "' needs a 'responses' list (sequence) or map (digest)");
}

std::string ReplayBackend::complete(const std::string& prompt) {
    ++calls_;
    if (by_digest_) {
        const auto d = prompt_digest(prompt);
        auto it = digests_.find(d);
        if (it == digests_.end()) throw Error(ErrorKind::FixtureExhausted, "no fixture for prompt digest " + d);
        return it->second;
    }
    if (next_ >= sequence_.size())
        throw Error(ErrorKind::FixtureExhausted,
                    "fixture exhausted after " + std::to_string(sequence_.size()) + " response(s)");
    return sequence_[next_++];
}

std::unique_ptr<CompletionBackend> make_backend(const AgentConfig& config) {
    config.validate();
    if (config.backend == BackendKind::Replay) return ReplayBackend::load(config.fixtures);
    return std::make_unique<LiveBackend>(config);
}

}  // namespace asmprop
