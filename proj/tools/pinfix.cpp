// pinfix: command-line front end for scenario validation, analysis, sweeps,
// rendering and the HTTP service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pinfix/experiments.hpp"
#include "pinfix/render.hpp"
#include "pinfix/scenario_io.hpp"
#include "pinfix/service.hpp"

namespace {

using namespace pinfix;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_indeterminate = 2;
constexpr int exit_usage = 64;

std::string read_text(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + path);
    out << text;
}

Scenario load(const std::string& ref) {
    if (ref.rfind("library:", 0) == 0) return library_scenario(ref.substr(8));
    return io::parse(read_text(ref));
}

struct Overrides {
    std::optional<double> displacement;
    std::string partition;
    std::string direction;
    std::string mode;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--displacement", displacement, "overtravel past hold, or fixed travel (mm)");
        cmd->add_option("--partition", partition, "row_comb | column_comb | checkerboard");
        cmd->add_option("--direction", direction, "clamp direction x,y (normalized)");
        cmd->add_option("--mode", mode, "close_until_held | fixed");
    }

    void apply(Scenario& s) const {
        if (displacement) s.clamp.displacement = *displacement;
        if (!partition.empty()) {
            if (partition == "row_comb") s.grid.partition = ElementPartition::row_comb;
            else if (partition == "column_comb") s.grid.partition = ElementPartition::column_comb;
            else if (partition == "checkerboard") s.grid.partition = ElementPartition::checkerboard;
            else throw ArgumentError("unknown partition '" + partition + "'");
        }
        if (!direction.empty()) {
            double x = 0.0;
            double y = 0.0;
            char comma = 0;
            std::istringstream in(direction);
            if (!(in >> x >> comma >> y) || comma != ',' || std::hypot(x, y) == 0.0)
                throw ArgumentError("direction must look like 1,0");
            s.grid.clamp_direction = normalized({x, y});
        }
        if (!mode.empty()) {
            if (mode == "fixed") s.clamp.mode = ClampMode::fixed;
            else if (mode == "close_until_held") s.clamp.mode = ClampMode::close_until_held;
            else throw ArgumentError("unknown clamp mode '" + mode + "'");
        }
        require_valid(s);
    }
};

/// start:stop:step
SweepSpec parse_range(SweepSpec w, const std::string& text) {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    char s1 = 0;
    char s2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> s1 >> b >> s2 >> c) || s1 != ':' || s2 != ':' || !(c > 0.0) || b < a)
        throw ArgumentError("--d expects start:stop:step with step > 0");
    w.start = a;
    w.stop = b;
    w.step = c;
    return w;
}

void print_summary(const ScenarioReport& r) {
    for (const auto& p : r.parts) {
        std::fprintf(stderr, "%-12s contacts %3d  rank %d  margin %+.3e  %s\n", p.id.c_str(), p.verdict.contact_count,
                     p.verdict.gn_rank, p.verdict.lp_margin, p.verdict.form_closure ? "form closure" : "NOT fixed");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pin-array fixture simulator and form-closure analysis"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string scenario_ref;
    std::string out_path;
    std::string svg_path;
    std::string d_range;
    std::string host = "127.0.0.1";
    int port = 8080;
    bool csv = false;
    Overrides overrides;

    auto* validate = app.add_subcommand("validate", "check a scenario document");
    validate->add_option("scenario", scenario_ref, "file, - for stdin, or library:<name>")->required();

    auto* run = app.add_subcommand("run", "memorize, clamp and analyze every part");
    run->add_option("scenario", scenario_ref, "file, - for stdin, or library:<name>")->required();
    run->add_option("--out", out_path, "report JSON path (stdout when omitted)");
    run->add_option("--svg", svg_path, "also write an SVG view");
    overrides.add_to(run);

    auto* sweep = app.add_subcommand("sweep", "distance sweep between two parts");
    sweep->add_option("scenario", scenario_ref, "file, - for stdin, or library:<name>")->required();
    sweep->add_option("--d", d_range, "start:stop:step in mm");
    sweep->add_option("--out", out_path, "output path (stdout when omitted)");
    sweep->add_flag("--csv", csv, "write CSV instead of JSON");
    overrides.add_to(sweep);

    auto* render = app.add_subcommand("render", "write an SVG view of the analyzed scenario");
    render->add_option("scenario", scenario_ref, "file, - for stdin, or library:<name>")->required();
    render->add_option("--out", out_path, "SVG path (stdout when omitted)");
    overrides.add_to(render);

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port");

    std::string library_name;
    auto* library = app.add_subcommand("library", "list built-in scenarios, or print one");
    library->add_option("name", library_name, "scenario to print as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return exit_usage;
    }

    try {
        if (*validate) {
            load(scenario_ref);
            std::cout << "valid\n";
        } else if (*run) {
            Scenario s = load(scenario_ref);
            overrides.apply(s);
            const ScenarioReport r = run_scenario(s);
            write_text(out_path, io::report_text(s, r));
            if (!svg_path.empty()) write_text(svg_path, render_svg(s, &r));
            print_summary(r);
        } else if (*sweep) {
            Scenario s = load(scenario_ref);
            overrides.apply(s);
            if (!s.sweep) throw ArgumentError("scenario has no sweep section");
            if (!d_range.empty()) s.sweep = parse_range(*s.sweep, d_range);
            const SweepResult r = run_sweep(s);
            write_text(out_path, csv ? io::sweep_csv(r) : io::to_json(r).dump(2) + "\n");
            if (r.threshold) std::fprintf(stderr, "rank threshold d* = %g mm\n", *r.threshold);
            else std::fprintf(stderr, "rank condition never holds to the end of the sweep\n");
        } else if (*render) {
            Scenario s = load(scenario_ref);
            overrides.apply(s);
            const ScenarioReport r = run_scenario(s);
            write_text(out_path, render_svg(s, &r));
        } else if (*serve) {
            service::Server server;
            if (!server.bind(host, port)) throw ArgumentError("cannot bind " + host + ":" + std::to_string(port));
            std::fprintf(stderr, "listening on http://%s:%d\n", host.c_str(), port);
            server.listen_after_bind();
        } else if (*library) {
            if (library_name.empty()) {
                for (const auto& e : scenario_library()) std::cout << e.name << "  " << e.description << "\n";
            } else {
                std::cout << io::serialize(library_scenario(library_name));
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return exit_invalid;
    } catch (const IndeterminateError& e) {
        std::cerr << "indeterminate: " << e.what() << "\n";
        return exit_indeterminate;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_ok;
}
