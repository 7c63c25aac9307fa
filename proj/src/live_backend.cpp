#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <json.hpp>

#include "asmprop/backend.hpp"
#include "asmprop/diagnostics.hpp"

namespace asmprop {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos)
        throw Error(ErrorKind::InvalidArgument, "endpoint '" + url + "' lacks a scheme");
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

LiveBackend::LiveBackend(AgentConfig config) : config_(std::move(config)) {
    config_.validate();
}

std::string LiveBackend::request_body(const std::string& prompt) const {
    nlohmann::json body = {
        {"model", config_.model},
        {"temperature", config_.temperature},
        {"n", 1},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    return body.dump();
}

std::string LiveBackend::parse_response(const std::string& body) {
    try {
        auto j = nlohmann::json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::UnparseableResponse, std::string("completion response lacks choice text: ") + e.what());
    }
}

std::string LiveBackend::complete(const std::string& prompt) {
    ++calls_;
    const Endpoint ep = split_endpoint(config_.endpoint);
    httplib::Client client(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(ep.path, headers, request_body(prompt), "application/json");
    if (!res)
        throw Error(ErrorKind::Network,
                    "request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw Error(ErrorKind::HttpStatus,
                    config_.endpoint + " answered HTTP " + std::to_string(res->status) + ": " + res->body);
    return parse_response(res->body);
}

}  // namespace asmprop
