#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "semweave/annotation.hpp"
#include "semweave/errors.hpp"
#include "semweave/grounding.hpp"

namespace semweave {

// Deterministic in-process service: request -> response lookup. Requests
// canonicalize through std::map ordering (fields sorted, values exact).
struct MockService {
    std::string name;
    std::map<SyntacticMessage, SyntacticMessage> handlers;
    std::set<SyntacticMessage> failures;
};

class MockRegistry {
public:
    void register_mock(MockService m) {
        if (mocks_.count(m.name))
            throw ConnectorError("duplicate mock name '" + m.name + "'");
        mocks_.emplace(m.name, std::move(m));
    }

    const MockService* find(const std::string& name) const {
        auto it = mocks_.find(name);
        return it == mocks_.end() ? nullptr : &it->second;
    }

private:
    std::map<std::string, MockService> mocks_;
};

namespace runtime_detail {

inline SyntacticMessage message_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + " must be a JSON object");
    SyntacticMessage msg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw ParseError(where + "." + it.key() + " must be a string");
        msg[it.key()] = it.value().get<std::string>();
    }
    return msg;
}

// Splits an absolute URL into httplib's host part and the request path.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConnectorError("endpoint url not absolute: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace runtime_detail

// Mock table file: {"name": ..., "handlers": [{"request": {...},
// "response": {...}}], "failures": [{...}]}. A top-level array registers
// several tables at once.
inline std::vector<MockService> parse_mock_file(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mock file syntax error: ") + e.what());
    }
    std::vector<nlohmann::json> entries;
    if (j.is_array())
        entries.assign(j.begin(), j.end());
    else
        entries.push_back(j);

    std::vector<MockService> out;
    for (const auto& ej : entries) {
        if (!ej.is_object() || !ej.contains("name") || !ej.at("name").is_string())
            throw ParseError("mock table needs a string 'name'");
        MockService m;
        m.name = ej.at("name").get<std::string>();
        if (ej.contains("handlers")) {
            if (!ej.at("handlers").is_array()) throw ParseError("mock 'handlers' must be an array");
            for (const auto& h : ej.at("handlers")) {
                if (!h.is_object() || !h.contains("request") || !h.contains("response"))
                    throw ParseError("mock handler needs 'request' and 'response'");
                m.handlers[runtime_detail::message_from_json(h.at("request"), "handler.request")] =
                    runtime_detail::message_from_json(h.at("response"), "handler.response");
            }
        }
        if (ej.contains("failures")) {
            if (!ej.at("failures").is_array()) throw ParseError("mock 'failures' must be an array");
            for (const auto& f : ej.at("failures"))
                m.failures.insert(runtime_detail::message_from_json(f, "failure"));
        }
        out.push_back(std::move(m));
    }
    return out;
}

// Dispatches service invocations to the mock registry or over HTTP.
// Immutable after setup; invoke is reentrant.
class ServiceRuntime {
public:
    ServiceRuntime() = default;
    explicit ServiceRuntime(MockRegistry mocks) : mocks_(std::move(mocks)) {}

    MockRegistry& mocks() { return mocks_; }
    const MockRegistry& mocks() const { return mocks_; }

    SyntacticMessage invoke(const EndpointRef& e, const SyntacticMessage& msg,
                            std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) const {
        if (timeout.count() <= 0) throw ConnectorError("timeout");
        if (e.kind == EndpointRef::Kind::Mock) {
            const MockService* m = mocks_.find(e.name);
            if (!m) throw ConnectorError("no mock registered under '" + e.name + "'");
            if (m->failures.count(msg))
                throw ConnectorError("mock '" + e.name + "' failure for this request");
            auto it = m->handlers.find(msg);
            if (it == m->handlers.end())
                throw ConnectorError("no handler in mock '" + e.name + "' for this request");
            return it->second;
        }
        return http_invoke(e, msg, timeout);
    }

private:
    static SyntacticMessage http_invoke(const EndpointRef& e, const SyntacticMessage& msg,
                                        std::chrono::milliseconds timeout) {
        auto [host, path] = runtime_detail::split_url(e.url);
        httplib::Client client(host);
        time_t sec = timeout.count() / 1000;
        time_t usec = (timeout.count() % 1000) * 1000;
        client.set_connection_timeout(sec, usec);
        client.set_read_timeout(sec, usec);
        client.set_write_timeout(sec, usec);

        std::string body = nlohmann::json(msg).dump();
        httplib::Result res;
        if (e.method == "POST" || e.method.empty())
            res = client.Post(path, body, "application/json");
        else if (e.method == "PUT")
            res = client.Put(path, body, "application/json");
        else if (e.method == "GET")
            res = client.Get(path + query_string(msg));
        else
            throw ConnectorError("unsupported http method '" + e.method + "'");

        if (!res) throw ConnectorError("transport error: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw ConnectorError("http status " + std::to_string(res->status));

        nlohmann::json rj;
        try {
            rj = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& ex) {
            throw ConnectorError(std::string("malformed response body: ") + ex.what());
        }
        try {
            return runtime_detail::message_from_json(rj, "response");
        } catch (const ParseError& ex) {
            throw ConnectorError(std::string("malformed response body: ") + ex.what());
        }
    }

    static std::string query_string(const SyntacticMessage& msg) {
        std::string qs;
        for (const auto& [k, v] : msg) {
            qs += qs.empty() ? '?' : '&';
            qs += httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
        }
        return qs;
    }

    MockRegistry mocks_;
};

}  // namespace semweave
