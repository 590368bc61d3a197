#pragma once

// Stateless HTTP/JSON front end. Every request carries the whole scenario; the
// handlers go through the same functions as the command-line tool.

#include <string>

#include "pinfix/error.hpp"
#include "pinfix/experiments.hpp"
#include "pinfix/render.hpp"
#include "pinfix/scenario_io.hpp"

// After Eigen: <resolv.h> defines a _res macro that clashes with Eigen parameter names.
#include <httplib.h>

namespace pinfix::service {

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// A scenario document, or a JSON string "library:<name>".
inline Scenario load_document(const std::string& text) {
    const io::json doc = io::parse_json(text);
    if (doc.is_string()) {
        const std::string ref = doc.get<std::string>();
        const std::string prefix = "library:";
        if (ref.rfind(prefix, 0) != 0)
            throw ValidationError(std::vector<ValidationIssue>{{"", "expected a scenario object or \"library:<name>\""}});
        try {
            return library_scenario(ref.substr(prefix.size()));
        } catch (const ArgumentError& e) {
            throw ValidationError(std::vector<ValidationIssue>{{"", e.what()}});
        }
    }
    return io::from_json(doc);
}

inline io::json library_json() {
    io::json list = io::json::array();
    for (const auto& e : scenario_library())
        list.push_back({{"name", e.name}, {"description", e.description}, {"scenario", io::to_json(e.scenario)}});
    return list;
}

namespace detail {

inline Response json_response(int status, const io::json& j) { return {status, "application/json", j.dump(2) + "\n"}; }

inline Response dispatch(const std::string& method, const std::string& path, const std::string& body,
                         const std::string& format) {
    if (path == "/api/library") {
        if (method != "GET") return json_response(405, io::error_json("method_not_allowed", "use GET"));
        return json_response(200, library_json());
    }
    const bool known = path == "/api/validate" || path == "/api/analyze" || path == "/api/sweep" || path == "/api/render";
    if (!known) return json_response(404, io::error_json("not_found", "no such endpoint: " + path));
    if (method != "POST") return json_response(405, io::error_json("method_not_allowed", "use POST"));

    if (path == "/api/validate") {
        try {
            load_document(body);
            return json_response(200, {{"valid", true}, {"issues", io::json::array()}});
        } catch (const ValidationError& e) {
            io::json issues = io::json::array();
            for (const auto& i : e.issues) issues.push_back({{"path", i.path}, {"message", i.message}});
            return json_response(200, {{"valid", false}, {"issues", std::move(issues)}});
        }
    }

    const Scenario s = load_document(body);
    if (path == "/api/analyze") return json_response(200, io::to_json(s.grid, run_scenario(s)));
    if (path == "/api/sweep") {
        const SweepResult r = run_sweep(s);
        if (format == "csv") return {200, "text/csv", io::sweep_csv(r)};
        return json_response(200, io::to_json(r));
    }
    const ScenarioReport report = run_scenario(s);
    return {200, "image/svg+xml", render_svg(s, &report)};
}

}  // namespace detail

/// Maps a request to a response; errors become JSON {code, message, path}.
inline Response handle(const std::string& method, const std::string& path, const std::string& body,
                       const std::string& format = "") {
    try {
        return detail::dispatch(method, path, body, format);
    } catch (const ValidationError& e) {
        return detail::json_response(400, io::error_json(e));
    } catch (const OutOfBoundsError& e) {
        return detail::json_response(400, io::error_json("out_of_bounds", e.what()));
    } catch (const IndeterminateError& e) {
        return detail::json_response(422, io::error_json("indeterminate", e.what()));
    } catch (const Error& e) {
        return detail::json_response(400, io::error_json("invalid_argument", e.what()));
    } catch (const std::exception& e) {
        return detail::json_response(500, io::error_json("internal_error", e.what()));
    }
}

class Server {
public:
    Server() {
        auto route = [this](const httplib::Request& req, httplib::Response& res) {
            const std::string format = req.has_param("format") ? req.get_param_value("format") : "";
            const Response r = handle(req.method, req.path, req.body, format);
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        for (const char* p : {"/api/validate", "/api/analyze", "/api/sweep", "/api/render", "/api/library"}) {
            server_.Post(p, route);
            server_.Get(p, route);
        }
        server_.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            res.set_content(io::error_json(res.status == 404 ? "not_found" : "http_error",
                                           "request failed: " + req.method + " " + req.path)
                                    .dump(2) +
                                "\n",
                            "application/json");
        });
    }

    /// Binds to a free port and returns it, or -1.
    int bind_any_port(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }
    void wait_until_ready() { server_.wait_until_ready(); }
    void stop() { server_.stop(); }

private:
    httplib::Server server_;
};

}  // namespace pinfix::service
