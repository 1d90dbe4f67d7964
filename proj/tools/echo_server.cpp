// Minimal JSON echo server for exercising http endpoints by hand:
// POST/PUT bodies come back verbatim; GET returns the query parameters
// as a flat JSON object. Usage: echo-server [port]

#include <cstdlib>
#include <iostream>
#include <string>

#include <httplib.h>
#include <json.hpp>

int main(int argc, char** argv) {
    int port = argc > 1 ? std::atoi(argv[1]) : 8080;

    httplib::Server srv;
    srv.Post(".*", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content(req.body, "application/json");
    });
    srv.Put(".*", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content(req.body, "application/json");
    });
    srv.Get(".*", [](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : req.params) j[k] = v;
        res.set_content(j.dump(), "application/json");
    });

    std::cout << "echo server listening on 127.0.0.1:" << port << "\n";
    if (!srv.listen("127.0.0.1", port)) {
        std::cerr << "failed to bind port " << port << "\n";
        return 1;
    }
    return 0;
}
