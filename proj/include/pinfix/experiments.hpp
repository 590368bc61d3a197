#pragma once

// Scenario runs: shared memorization of several parts, per-part clamping and
// closure analysis, the triangle/square distance sweep, and the built-in
// scenario library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pinfix/closure.hpp"
#include "pinfix/error.hpp"
#include "pinfix/fixture.hpp"
#include "pinfix/glyphs.hpp"

namespace pinfix {

/// How the sweep distance d is measured between the two parts.
enum class SweepDatum {
    centroid,  // d = centroid separation; d = 0 puts the centroids together
    boundary,  // d = gap between the footprints along the centroid line
};

struct SweepSpec {
    std::string fixed;   // part that is clamped and counted
    std::string moving;  // part placed at distance d
    Vec2 direction{0.0, 1.0};
    double start = 0.0;
    double stop = 300.0;
    double step = 10.0;
    SweepDatum datum = SweepDatum::centroid;

    std::vector<double> values() const {
        std::vector<double> out;
        if (!(step > 0.0)) return out;
        const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

inline const std::vector<std::string>& known_analyses() {
    static const std::vector<std::string> names{"memorize", "clamp", "closure", "overlap", "sweep"};
    return names;
}

struct Scenario {
    PinGrid grid;
    std::vector<PlacedPart> parts;
    ClampOptions clamp;
    std::vector<std::string> analyses{"closure"};
    std::optional<SweepSpec> sweep;
    std::uint64_t seed = 0;

    const PlacedPart* find(const std::string& id) const {
        for (const auto& p : parts)
            if (p.id == id) return &p;
        return nullptr;
    }
    bool wants(const std::string& analysis) const {
        return std::find(analyses.begin(), analyses.end(), analysis) != analyses.end();
    }
};

inline bool operator==(const Scenario& a, const Scenario& b) {
    return a.grid == b.grid && a.parts == b.parts && a.clamp == b.clamp && a.analyses == b.analyses &&
           a.sweep == b.sweep && a.seed == b.seed;
}

/// All problems with a scenario, each tagged with a JSON pointer into the
/// scenario document.
inline std::vector<ValidationIssue> validate_scenario(const Scenario& s) {
    std::vector<ValidationIssue> issues;
    auto issue = [&](std::string path, std::string message) { issues.push_back({std::move(path), std::move(message)}); };

    const auto& g = s.grid;
    const std::size_t before = issues.size();
    if (!(g.pitch > 0.0) || !std::isfinite(g.pitch)) issue("/grid/pitch_mm", "pitch must be positive");
    if (g.rows < 2) issue("/grid/rows", "grid needs at least 2 rows");
    if (g.cols < 2) issue("/grid/cols", "grid needs at least 2 columns");
    if (!is_finite(g.origin)) issue("/grid/origin", "grid origin must be finite");
    if (!is_finite(g.clamp_direction) || std::abs(norm(g.clamp_direction) - 1.0) > 1e-9)
        issue("/grid/clamp_direction", "clamp direction must be a unit vector");
    if (!(g.pin_stiffness > 0.0) || !std::isfinite(g.pin_stiffness))
        issue("/grid/pin_stiffness", "pin stiffness must be positive");
    const bool grid_ok = issues.size() == before;
    if (s.parts.empty()) issue("/parts", "at least one part is required");

    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.parts.size(); ++i) {
        const auto& p = s.parts[i];
        const std::string path = "/parts/" + std::to_string(i);
        if (p.id.empty()) issue(path + "/id", "part id must not be empty");
        else if (!seen.insert(p.id).second) issue(path + "/id", "duplicate part id '" + p.id + "'");
        if (!is_finite(p.pose.translation) || !std::isfinite(p.pose.rotation)) issue(path + "/pose", "pose must be finite");
        else if (grid_ok) {
            try {
                require_in_bounds(s.grid, p);
            } catch (const OutOfBoundsError& e) {
                issue(path + "/pose", e.what());
            }
        }
    }

    if (!(s.clamp.displacement >= 0.0) || (grid_ok && !(s.clamp.displacement < s.grid.pitch)))
        issue("/clamp_displacement_mm", "clamp displacement must lie in [0, pitch)");
    if (!(s.clamp.stroke_pitches > 0.0) || !std::isfinite(s.clamp.stroke_pitches))
        issue("/stroke_pitches", "stroke must be positive");

    for (std::size_t i = 0; i < s.analyses.size(); ++i) {
        const auto& known = known_analyses();
        if (std::find(known.begin(), known.end(), s.analyses[i]) == known.end())
            issue("/analyses/" + std::to_string(i), "unknown analysis '" + s.analyses[i] + "'");
    }

    if (s.sweep) {
        const auto& w = *s.sweep;
        if (!s.find(w.fixed)) issue("/sweep/fixed", "no part with id '" + w.fixed + "'");
        if (!s.find(w.moving)) issue("/sweep/moving", "no part with id '" + w.moving + "'");
        if (w.fixed == w.moving) issue("/sweep/moving", "sweep needs two different parts");
        if (!is_finite(w.direction) || std::abs(norm(w.direction) - 1.0) > 1e-9)
            issue("/sweep/direction", "sweep direction must be a unit vector");
        if (!(w.step > 0.0) || !std::isfinite(w.step)) issue("/sweep/step", "step must be positive");
        if (!std::isfinite(w.start) || !std::isfinite(w.stop) || w.stop < w.start)
            issue("/sweep/stop", "sweep range must satisfy start <= stop");
    } else if (s.wants("sweep")) {
        issue("/sweep", "the sweep analysis needs a sweep section");
    }
    return issues;
}

inline void require_valid(const Scenario& s) {
    auto issues = validate_scenario(s);
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

struct PartReport {
    std::string id;
    std::size_t memorized_pins = 0;
    /// Pins this part's footprint shares with any other part, row-major.
    std::vector<PinIndex> overlap_pins;
    ClampResult clamp;
    ClosureVerdict verdict;
};

/// Memorize + clamp + closure for one part against a given configuration.
inline PartReport analyze_part(const PinGrid& grid, const PinConfig& config, const PlacedPart& part,
                               const ClampOptions& opt) {
    PartReport r;
    r.id = part.id;
    r.memorized_pins = footprint_pins(grid, part).size();
    r.clamp = clamp(grid, config, part, opt);
    r.verdict = form_closure_lp(r.clamp.contacts, closure_frame(part, r.clamp.settled_pose));
    return r;
}

struct SweepRow {
    double d = 0.0;
    int contact_count = 0;
    int gn_rank = 0;
    bool rank_condition_met = false;
    bool form_closure = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// Smallest swept d from which the rank condition holds at every larger d.
    std::optional<double> threshold;
    /// Number of places where c drops as d grows.
    int inversions = 0;
};

struct ScenarioReport {
    PinConfig config;  // shared by every per-part clamp
    std::vector<PartReport> parts;
    std::optional<SweepResult> sweep;
};

/// Position of the moving part for separation d: its centroid is carried to
/// the fixed part's centroid plus the separation along the sweep direction.
inline PlacedPart place_at_distance(const PlacedPart& fixed, const PlacedPart& moving, Vec2 direction, double d,
                                    SweepDatum datum) {
    double sep = d;
    if (datum == SweepDatum::boundary) sep += extent_along(fixed, direction) + extent_along(moving, -direction);
    PlacedPart out = moving;
    out.pose.translation += fixed.centroid() + direction * sep - moving.centroid();
    return out;
}

inline SweepResult summarize_sweep(std::vector<SweepRow> rows) {
    SweepResult r;
    r.rows = std::move(rows);
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        if (r.rows[i].contact_count < r.rows[i - 1].contact_count) ++r.inversions;
    for (std::size_t i = r.rows.size(); i-- > 0;) {
        if (!r.rows[i].rank_condition_met) break;
        r.threshold = r.rows[i].d;
    }
    return r;
}

/// For each d: memorize both parts, clamp the fixed part, record its contact
/// count, rank and verdict. Points run concurrently.
inline SweepResult distance_sweep(const PinGrid& grid, const PlacedPart& fixed, const PlacedPart& moving,
                                  const std::vector<double>& d_values, Vec2 direction = {0.0, 1.0},
                                  SweepDatum datum = SweepDatum::centroid, const ClampOptions& opt = {}) {
    grid.validate();
    if (std::abs(norm(direction) - 1.0) > 1e-9) throw ArgumentError("sweep direction must be a unit vector");
    for (const double d : d_values) {
        const PlacedPart m = place_at_distance(fixed, moving, direction, d, datum);
        try {
            require_in_bounds(grid, fixed);
            require_in_bounds(grid, m);
        } catch (const OutOfBoundsError& e) {
            throw OutOfBoundsError(e.part, "d = " + std::to_string(d) + " mm: " + e.what());
        }
    }

    std::vector<std::future<SweepRow>> jobs;
    for (const double d : d_values) {
        jobs.push_back(std::async(std::launch::async, [&, d] {
            const PlacedPart m = place_at_distance(fixed, moving, direction, d, datum);
            const PinConfig config = memorize(grid, memorize(grid, PinConfig::all_extended(grid), fixed), m);
            const PartReport pr = analyze_part(grid, config, fixed, opt);
            return SweepRow{d, pr.verdict.contact_count, pr.verdict.gn_rank, pr.verdict.rank_condition_met,
                            pr.verdict.form_closure};
        }));
    }
    std::vector<SweepRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    return summarize_sweep(std::move(rows));
}

inline SweepResult run_sweep(const Scenario& s) {
    require_valid(s);
    if (!s.sweep) throw ArgumentError("scenario has no sweep section");
    const auto& w = *s.sweep;
    return distance_sweep(s.grid, *s.find(w.fixed), *s.find(w.moving), w.values(), w.direction, w.datum, s.clamp);
}

/// Memorizes every part into one configuration, then clamps and analyzes each
/// part against that same configuration.
inline ScenarioReport run_scenario(const Scenario& s) {
    require_valid(s);
    ScenarioReport report;
    report.config = PinConfig::all_extended(s.grid);
    for (const auto& p : s.parts) report.config = memorize(s.grid, report.config, p);

    std::vector<std::future<PartReport>> jobs;
    for (const auto& p : s.parts)
        jobs.push_back(std::async(std::launch::async,
                                  [&s, &report, &p] { return analyze_part(s.grid, report.config, p, s.clamp); }));
    for (auto& j : jobs) report.parts.push_back(j.get());

    for (std::size_t i = 0; i < s.parts.size(); ++i) {
        std::set<PinIndex> shared;
        for (std::size_t k = 0; k < s.parts.size(); ++k) {
            if (k == i) continue;
            for (const auto& p : memorized_overlap(s.grid, s.parts[i], s.parts[k])) shared.insert(p);
        }
        report.parts[i].overlap_pins.assign(shared.begin(), shared.end());
    }

    if (s.wants("sweep")) report.sweep = run_sweep(s);
    return report;
}

struct IsolatedAnalysis {
    int contact_count = 0;
    int gn_rank = 0;
    ClosureVerdict verdict;
    ClampResult clamp;
};

/// Single part on an otherwise empty fixture.
inline IsolatedAnalysis isolated_part_analysis(const PlacedPart& part, const PinGrid& grid,
                                               const ClampOptions& opt = {}) {
    grid.validate();
    const PinConfig config = memorize(grid, PinConfig::all_extended(grid), part);
    const PartReport r = analyze_part(grid, config, part, opt);
    return {r.verdict.contact_count, r.verdict.gn_rank, r.verdict, r.clamp};
}

// Built-in scenarios. Poses are reconstructions; the letter and cylinder layouts
// sit at a half-pitch lattice phase.

struct LibraryEntry {
    std::string name;
    std::string description;
    Scenario scenario;
};

namespace detail {

inline PlacedPart at(std::string id, PartShape shape, double x, double y, double rotation = 0.0) {
    return {std::move(id), std::move(shape), Pose2{{x, y}, rotation}};
}

inline PinGrid library_grid(int rows, int cols) {
    PinGrid g;
    g.rows = rows;
    g.cols = cols;
    return g;
}

inline Scenario letters(std::vector<PlacedPart> parts) {
    Scenario s;
    s.grid = library_grid(40, 64);
    s.parts = std::move(parts);
    return s;
}

}  // namespace detail

inline PlacedPart library_triangle() { return detail::at("triangle", glyphs::triangle(45.0, 45.0), 72.5, 70.0); }
inline PlacedPart library_equilateral_triangle() {
    return detail::at("triangle", glyphs::equilateral_triangle(45.0), 72.5, 71.25);
}
inline PlacedPart library_square() { return detail::at("square", glyphs::square(45.0), 70.0, 70.0); }
inline PinGrid isolated_grid() { return detail::library_grid(30, 30); }

inline std::vector<LibraryEntry> scenario_library() {
    using detail::at;
    using detail::letters;
    std::vector<LibraryEntry> lib;

    lib.push_back({"ltx", "L, T and X in separate areas; all three held",
                   letters({at("L", glyphs::letter_l(), 52.5, 97.5), at("T", glyphs::letter_t(), 152.5, 97.5),
                            at("X", glyphs::letter_x(), 252.5, 97.5)})});
    lib.push_back({"ft-success", "F and T with separate clamping areas",
                   letters({at("F", glyphs::letter_f(), 82.5, 97.5), at("T", glyphs::letter_t(), 202.5, 97.5)})});
    lib.push_back({"ft-failure", "F's stem memorized on top of T's stem",
                   letters({at("F", glyphs::letter_f(), 170.0, 97.5), at("T", glyphs::letter_t(), 152.5, 97.5)})});
    lib.push_back({"gc-success", "G and C with separate clamping areas",
                   letters({at("G", glyphs::letter_g(), 82.5, 97.5), at("C", glyphs::letter_c(), 202.5, 97.5)})});
    lib.push_back({"gc-failure", "G and C memorized 10 mm apart",
                   letters({at("G", glyphs::letter_g(), 160.0, 95.0), at("C", glyphs::letter_c(), 150.0, 95.0)})});
    lib.push_back({"two-cylinders", "cylinders of radius 20 and 12.5 in separate areas",
                   letters({at("big", glyphs::cylinder(20.0), 82.5, 97.5),
                            at("small", glyphs::cylinder(12.5), 202.5, 97.5)})});
    lib.push_back({"nested-circles", "cylinder of radius 10 inside the area of a radius 20 cylinder",
                   letters({at("big", glyphs::cylinder(20.0), 122.5, 97.5),
                            at("small", glyphs::cylinder(10.0), 122.5, 97.5)})});

    auto isolated = [](PlacedPart p) {
        Scenario s;
        s.grid = isolated_grid();
        s.parts = {std::move(p)};
        return s;
    };
    lib.push_back({"triangle", "isosceles triangle, base 45, height 45", isolated(library_triangle())});
    lib.push_back({"equilateral-triangle", "equilateral triangle, side 45", isolated(library_equilateral_triangle())});
    lib.push_back({"square", "square, side 45", isolated(library_square())});

    {
        Scenario s;
        s.grid = detail::library_grid(100, 50);
        const PlacedPart tri = at("triangle", glyphs::triangle(45.0, 45.0), 122.5, 120.0);
        SweepSpec w{"triangle", "square", {0.0, 1.0}, 0.0, 300.0, 10.0, SweepDatum::centroid};
        s.parts = {tri, place_at_distance(tri, at("square", glyphs::square(45.0), 0.0, 0.0), w.direction, w.stop,
                                          w.datum)};
        s.analyses = {"closure", "sweep"};
        s.sweep = w;
        lib.push_back({"approach-sweep", "triangle with a square approaching from the apex side, d from 0 to 300 mm",
                       std::move(s)});
    }
    return lib;
}

inline std::vector<std::string> library_names() {
    std::vector<std::string> names;
    for (const auto& e : scenario_library()) names.push_back(e.name);
    return names;
}

inline Scenario library_scenario(const std::string& name) {
    for (auto& e : scenario_library())
        if (e.name == name) return std::move(e.scenario);
    throw ArgumentError("unknown library scenario '" + name + "'");
}

}  // namespace pinfix
