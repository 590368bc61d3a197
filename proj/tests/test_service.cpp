#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "pinfix/service.hpp"

using namespace pinfix;
using io::json;

namespace {

json body_of(const service::Response& r) { return json::parse(r.body); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + PINFIX_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("pinfix_test_" + name);
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_CASE("library endpoint lists every built-in scenario", "[service]") {
    const auto r = service::handle("GET", "/api/library", "");
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "application/json");
    const json j = body_of(r);
    CHECK(j.size() == scenario_library().size());
    CHECK(j[0].contains("scenario"));
    CHECK(service::handle("POST", "/api/library", "").status == 405);
}

TEST_CASE("analyze a library reference", "[service]") {
    const auto r = service::handle("POST", "/api/analyze", "\"library:nested-circles\"");
    REQUIRE(r.status == 200);
    const json j = body_of(r);
    bool seen = false;
    for (const auto& p : j["parts"])
        if (p["id"] == "small") {
            seen = true;
            CHECK(p["contact_count"] == 0);
            CHECK(p["form_closure"] == false);
        }
    CHECK(seen);
}

TEST_CASE("analyze an inline scenario", "[service]") {
    const std::string doc = io::serialize(library_scenario("square"));
    const auto r = service::handle("POST", "/api/analyze", doc);
    REQUIRE(r.status == 200);
    CHECK(body_of(r)["parts"][0]["form_closure"] == true);
}

TEST_CASE("validate endpoint", "[service]") {
    auto r = service::handle("POST", "/api/validate", "\"library:ltx\"");
    REQUIRE(r.status == 200);
    CHECK(body_of(r)["valid"] == true);

    json doc = io::to_json(library_scenario("square"));
    doc["parts"][0]["pose"]["x"] = -500;
    r = service::handle("POST", "/api/validate", doc.dump());
    REQUIRE(r.status == 200);
    const json j = body_of(r);
    CHECK(j["valid"] == false);
    CHECK(j["issues"][0]["path"] == "/parts/0/pose");
}

TEST_CASE("errors map to status codes with a JSON body", "[service]") {
    auto r = service::handle("POST", "/api/analyze", "{not json");
    CHECK(r.status == 400);
    CHECK(body_of(r)["code"] == "validation_error");

    r = service::handle("POST", "/api/analyze", "\"library:unknown\"");
    CHECK(r.status == 400);

    json doc = io::to_json(library_scenario("square"));
    doc["surprise"] = true;
    r = service::handle("POST", "/api/analyze", doc.dump());
    CHECK(r.status == 400);
    CHECK(body_of(r)["path"] == "/surprise");

    r = service::handle("POST", "/api/sweep", "\"library:square\"");
    CHECK(r.status == 400);
    CHECK(body_of(r)["code"] == "invalid_argument");

    r = service::handle("POST", "/api/nothing", "");
    CHECK(r.status == 404);
    CHECK(body_of(r)["code"] == "not_found");

    CHECK(service::handle("GET", "/api/analyze", "").status == 405);
}

TEST_CASE("sweep endpoint in JSON and CSV", "[service]") {
    json doc = io::to_json(library_scenario("approach-sweep"));
    doc["sweep"]["start_mm"] = 200;
    doc["sweep"]["stop_mm"] = 220;
    auto r = service::handle("POST", "/api/sweep", doc.dump());
    REQUIRE(r.status == 200);
    CHECK(body_of(r)["rows"].size() == 3);
    r = service::handle("POST", "/api/sweep", doc.dump(), "csv");
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "text/csv");
    CHECK(r.body.rfind("d_mm,c,gn_rank,rank_ok,form_closure\n", 0) == 0);
}

TEST_CASE("render endpoint returns SVG with one circle per pin", "[service]") {
    const auto r = service::handle("POST", "/api/render", "\"library:square\"");
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "image/svg+xml");
    CHECK(r.body.rfind("<svg", 0) == 0);
    std::size_t pins = 0;
    for (std::size_t pos = 0; (pos = r.body.find("class=\"pin ", pos)) != std::string::npos; ++pos) ++pins;
    CHECK(pins == isolated_grid().pin_count());
    CHECK(r.body.find("contact") != std::string::npos);
}

TEST_CASE("HTTP server answers on a free port", "[service][http]") {
    service::Server server;
    const int port = server.bind_any_port();
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto lib = client.Get("/api/library");
    REQUIRE(lib);
    CHECK(lib->status == 200);

    auto res = client.Post("/api/analyze", "\"library:square\"", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["parts"][0]["form_closure"] == true);

    auto bad = client.Post("/api/analyze", "{}", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    auto csv = client.Post("/api/sweep?format=csv", "\"library:approach-sweep\"", "application/json");
    REQUIRE(csv);
    CHECK(csv->status == 200);
    CHECK(csv->get_header_value("Content-Type").find("text/csv") != std::string::npos);

    auto missing = client.Get("/nowhere");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["code"] == "not_found");

    server.stop();
    t.join();
}

TEST_CASE("command-line exit codes", "[service][cli]") {
    CHECK(run_cli("library") == 0);
    CHECK(run_cli("validate library:square") == 0);
    CHECK(run_cli("frobnicate") == 64);
    CHECK(run_cli("run --no-such-flag library:square") == 64);

    json doc = io::to_json(library_scenario("square"));
    doc["parts"][0]["pose"]["x"] = -500;
    const auto bad = temp_file("bad.json", doc.dump());
    CHECK(run_cli("validate " + bad.string()) == 1);
    CHECK(run_cli("run " + bad.string()) == 1);
    CHECK(run_cli("run /no/such/file.json") == 1);

    json negative = io::to_json(library_scenario("square"));
    negative["grid"]["pitch_mm"] = -5;
    const auto neg = temp_file("negative_pitch.json", negative.dump());
    const auto log = std::filesystem::temp_directory_path() / "pinfix_test_stderr.txt";
    const std::string cmd =
        std::string("\"") + PINFIX_CLI_PATH + "\" validate " + neg.string() + " 2>" + log.string() + " >/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 1);
    std::ifstream err(log);
    const std::string message{std::istreambuf_iterator<char>(err), {}};
    CHECK(message.find("/grid/pitch_mm") != std::string::npos);

    const auto out = std::filesystem::temp_directory_path() / "pinfix_test_report.json";
    CHECK(run_cli("run library:square --out " + out.string()) == 0);
    std::ifstream in(out);
    const json report = json::parse(in);
    CHECK(report["parts"][0]["form_closure"] == true);
}
