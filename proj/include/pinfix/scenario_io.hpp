#pragma once

// JSON scenario documents (schema version "1"), JSON reports and sweep CSV.

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinfix/error.hpp"
#include "pinfix/experiments.hpp"

namespace pinfix::io {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1";

inline const char* to_string(ElementPartition p) {
    switch (p) {
    case ElementPartition::row_comb: return "row_comb";
    case ElementPartition::column_comb: return "column_comb";
    case ElementPartition::checkerboard: return "checkerboard";
    }
    return "row_comb";
}

inline const char* to_string(ClampMode m) { return m == ClampMode::fixed ? "fixed" : "close_until_held"; }
inline const char* to_string(SweepDatum d) { return d == SweepDatum::boundary ? "boundary" : "centroid"; }

inline json vec_json(Vec2 v) { return json::array({v.x, v.y}); }
inline json pin_json(PinIndex p) { return json::array({p.row, p.col}); }
inline json pose_json(const Pose2& p) { return {{"x", p.translation.x}, {"y", p.translation.y}, {"theta", p.rotation}}; }

inline json shape_json(const PartShape& s) {
    if (const auto* c = s.as_circle()) return {{"type", "circle"}, {"radius", c->radius}};
    json verts = json::array();
    for (const auto& v : s.as_polygon()->vertices()) verts.push_back(vec_json(v));
    return {{"type", "polygon"}, {"vertices", std::move(verts)}};
}

inline json to_json(const Scenario& s) {
    json grid = {{"pitch_mm", s.grid.pitch},
                 {"rows", s.grid.rows},
                 {"cols", s.grid.cols},
                 {"origin", vec_json(s.grid.origin)},
                 {"element_partition", to_string(s.grid.partition)},
                 {"clamp_direction", vec_json(s.grid.clamp_direction)},
                 {"pin_stiffness", s.grid.pin_stiffness}};
    json parts = json::array();
    for (const auto& p : s.parts) parts.push_back({{"id", p.id}, {"shape", shape_json(p.shape)}, {"pose", pose_json(p.pose)}});
    json doc = {{"version", schema_version},
                {"grid", std::move(grid)},
                {"parts", std::move(parts)},
                {"clamp_displacement_mm", s.clamp.displacement},
                {"clamp_mode", to_string(s.clamp.mode)},
                {"stroke_pitches", s.clamp.stroke_pitches},
                {"analyses", s.analyses}};
    if (s.sweep) {
        const auto& w = *s.sweep;
        doc["sweep"] = {{"fixed", w.fixed},       {"moving", w.moving},   {"direction", vec_json(w.direction)},
                        {"start_mm", w.start},    {"stop_mm", w.stop},    {"step_mm", w.step},
                        {"datum", to_string(w.datum)}};
    }
    doc["seed"] = s.seed;
    return doc;
}

inline std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

namespace detail {

/// Walks a document, recording every problem with its JSON pointer instead of
/// stopping at the first one.
class Reader {
public:
    std::vector<ValidationIssue> issues;

    void fail(const std::string& path, std::string message) { issues.push_back({path, std::move(message)}); }

    bool object(const json& j, const std::string& path, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [key, value] : j.items())
            if (!allowed.contains(key)) fail(path + "/" + key, "unknown field '" + key + "'");
        for (const auto& key : required)
            if (!j.contains(key)) fail(path + "/" + key, "missing required field '" + key + "'");
        return true;
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            fail(path, "expected a finite number");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> integer(const json& j, const std::string& path) {
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
            return std::nullopt;
        }
        return j.get<long long>();
    }

    std::optional<std::string> string(const json& j, const std::string& path) {
        if (!j.is_string()) {
            fail(path, "expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    std::optional<Vec2> vec(const json& j, const std::string& path) {
        if (!j.is_array() || j.size() != 2) {
            fail(path, "expected [x, y]");
            return std::nullopt;
        }
        const auto x = number(j[0], path + "/0");
        const auto y = number(j[1], path + "/1");
        if (!x || !y) return std::nullopt;
        return Vec2{*x, *y};
    }

    template <class T>
    void optional_number(const json& j, const char* key, const std::string& path, T& out) {
        if (!j.contains(key)) return;
        if (const auto v = number(j[key], path + "/" + key)) out = static_cast<T>(*v);
    }
};

inline void read_grid(Reader& r, const json& j, PinGrid& g) {
    const std::string path = "/grid";
    if (!r.object(j, path, {"pitch_mm", "rows", "cols", "origin", "element_partition", "clamp_direction", "pin_stiffness"},
                  {"rows", "cols"}))
        return;
    r.optional_number(j, "pitch_mm", path, g.pitch);
    if (j.contains("rows"))
        if (const auto v = r.integer(j["rows"], path + "/rows")) g.rows = static_cast<int>(*v);
    if (j.contains("cols"))
        if (const auto v = r.integer(j["cols"], path + "/cols")) g.cols = static_cast<int>(*v);
    if (j.contains("origin"))
        if (const auto v = r.vec(j["origin"], path + "/origin")) g.origin = *v;
    if (j.contains("element_partition")) {
        if (const auto v = r.string(j["element_partition"], path + "/element_partition")) {
            if (*v == "row_comb") g.partition = ElementPartition::row_comb;
            else if (*v == "column_comb") g.partition = ElementPartition::column_comb;
            else if (*v == "checkerboard") g.partition = ElementPartition::checkerboard;
            else r.fail(path + "/element_partition", "expected row_comb, column_comb or checkerboard");
        }
    }
    if (j.contains("clamp_direction"))
        if (const auto v = r.vec(j["clamp_direction"], path + "/clamp_direction")) g.clamp_direction = *v;
    r.optional_number(j, "pin_stiffness", path, g.pin_stiffness);
}

inline std::optional<PartShape> read_shape(Reader& r, const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        r.fail(path + "/type", "shape needs a type: polygon or circle");
        return std::nullopt;
    }
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "circle") {
            if (!r.object(j, path, {"type", "radius"}, {"radius"})) return std::nullopt;
            const auto radius = j.contains("radius") ? r.number(j["radius"], path + "/radius") : std::nullopt;
            if (!radius) return std::nullopt;
            return PartShape::circle(*radius);
        }
        if (type == "polygon") {
            if (!r.object(j, path, {"type", "vertices"}, {"vertices"}) || !j.contains("vertices")) return std::nullopt;
            const json& vs = j["vertices"];
            if (!vs.is_array()) {
                r.fail(path + "/vertices", "expected an array of [x, y]");
                return std::nullopt;
            }
            std::vector<Vec2> pts;
            bool ok = true;
            for (std::size_t i = 0; i < vs.size(); ++i) {
                if (const auto v = r.vec(vs[i], path + "/vertices/" + std::to_string(i))) pts.push_back(*v);
                else ok = false;
            }
            if (!ok) return std::nullopt;
            return PartShape::polygon(std::move(pts));
        }
    } catch (const GeometryError& e) {
        r.fail(path, e.what());
        return std::nullopt;
    }
    r.fail(path + "/type", "unknown shape type '" + type + "'");
    return std::nullopt;
}

inline std::optional<Pose2> read_pose(Reader& r, const json& j, const std::string& path) {
    if (!r.object(j, path, {"x", "y", "theta"}, {"x", "y"})) return std::nullopt;
    Pose2 p;
    bool ok = true;
    if (j.contains("x")) {
        if (const auto v = r.number(j["x"], path + "/x")) p.translation.x = *v;
        else ok = false;
    }
    if (j.contains("y")) {
        if (const auto v = r.number(j["y"], path + "/y")) p.translation.y = *v;
        else ok = false;
    }
    r.optional_number(j, "theta", path, p.rotation);
    if (!ok || !j.contains("x") || !j.contains("y")) return std::nullopt;
    return p;
}

inline void read_sweep(Reader& r, const json& j, Scenario& s) {
    const std::string path = "/sweep";
    if (!r.object(j, path, {"fixed", "moving", "direction", "start_mm", "stop_mm", "step_mm", "datum"},
                  {"fixed", "moving"}))
        return;
    SweepSpec w;
    if (j.contains("fixed"))
        if (const auto v = r.string(j["fixed"], path + "/fixed")) w.fixed = *v;
    if (j.contains("moving"))
        if (const auto v = r.string(j["moving"], path + "/moving")) w.moving = *v;
    if (j.contains("direction"))
        if (const auto v = r.vec(j["direction"], path + "/direction")) w.direction = *v;
    r.optional_number(j, "start_mm", path, w.start);
    r.optional_number(j, "stop_mm", path, w.stop);
    r.optional_number(j, "step_mm", path, w.step);
    if (j.contains("datum")) {
        if (const auto v = r.string(j["datum"], path + "/datum")) {
            if (*v == "centroid") w.datum = SweepDatum::centroid;
            else if (*v == "boundary") w.datum = SweepDatum::boundary;
            else r.fail(path + "/datum", "expected centroid or boundary");
        }
    }
    s.sweep = w;
}

}  // namespace detail

/// Parses and validates a scenario document. Every problem found is reported
/// in one ValidationError.
inline Scenario from_json(const json& doc) {
    detail::Reader r;
    Scenario s;
    if (!r.object(doc, "",
                  {"version", "grid", "parts", "clamp_displacement_mm", "clamp_mode", "stroke_pitches", "analyses",
                   "sweep", "seed"},
                  {"version", "grid", "parts"}))
        throw ValidationError(std::move(r.issues));

    if (doc.contains("version")) {
        const auto v = r.string(doc["version"], "/version");
        if (v && *v != schema_version)
            r.fail("/version", "unsupported version '" + *v + "', expected '" + schema_version + "'");
    }
    if (doc.contains("grid")) detail::read_grid(r, doc["grid"], s.grid);

    if (doc.contains("parts")) {
        const json& parts = doc["parts"];
        if (!parts.is_array()) r.fail("/parts", "expected an array");
        else {
            for (std::size_t i = 0; i < parts.size(); ++i) {
                const std::string path = "/parts/" + std::to_string(i);
                const json& pj = parts[i];
                if (!r.object(pj, path, {"id", "shape", "pose"}, {"id", "shape", "pose"})) continue;
                std::optional<std::string> id = pj.contains("id") ? r.string(pj["id"], path + "/id") : std::nullopt;
                auto shape = pj.contains("shape") ? detail::read_shape(r, pj["shape"], path + "/shape") : std::nullopt;
                auto pose = pj.contains("pose") ? detail::read_pose(r, pj["pose"], path + "/pose") : std::nullopt;
                if (id && shape && pose) s.parts.push_back({*id, std::move(*shape), *pose});
            }
        }
    }

    r.optional_number(doc, "clamp_displacement_mm", "", s.clamp.displacement);
    r.optional_number(doc, "stroke_pitches", "", s.clamp.stroke_pitches);
    if (doc.contains("clamp_mode")) {
        if (const auto v = r.string(doc["clamp_mode"], "/clamp_mode")) {
            if (*v == "close_until_held") s.clamp.mode = ClampMode::close_until_held;
            else if (*v == "fixed") s.clamp.mode = ClampMode::fixed;
            else r.fail("/clamp_mode", "expected close_until_held or fixed");
        }
    }
    if (doc.contains("analyses")) {
        const json& a = doc["analyses"];
        if (!a.is_array()) r.fail("/analyses", "expected an array of names");
        else {
            s.analyses.clear();
            for (std::size_t i = 0; i < a.size(); ++i)
                if (const auto v = r.string(a[i], "/analyses/" + std::to_string(i))) s.analyses.push_back(*v);
        }
    }
    if (doc.contains("sweep")) detail::read_sweep(r, doc["sweep"], s);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
            r.fail("/seed", "expected a non-negative integer");
        else s.seed = doc["seed"].get<std::uint64_t>();
    }

    if (!r.issues.empty()) throw ValidationError(std::move(r.issues));
    require_valid(s);
    return s;
}

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::vector<ValidationIssue>{{"", std::string("malformed JSON: ") + e.what()}});
    }
}

inline Scenario parse(const std::string& text) { return from_json(parse_json(text)); }

inline json to_json(const ClosureVerdict& v) {
    json j = {{"contact_count", v.contact_count},
              {"gn_rank", v.gn_rank},
              {"rank_condition_met", v.rank_condition_met},
              {"lp_margin", v.lp_margin},
              {"form_closure", v.form_closure}};
    if (v.escape_twist) j["escape_twist"] = {{"vx", v.escape_twist->v.x}, {"vy", v.escape_twist->v.y}, {"w", v.escape_twist->w}};
    else j["escape_twist"] = nullptr;
    return j;
}

inline json to_json(const PartReport& p) {
    json contacts = json::array();
    for (std::size_t i = 0; i < p.clamp.contacts.size(); ++i) {
        const auto& c = p.clamp.contacts[i];
        json cj = {{"pin", c.pin ? pin_json(*c.pin) : json(nullptr)},
                   {"point", vec_json(c.point)},
                   {"normal", vec_json(c.normal)}};
        if (i < p.clamp.deflections.size()) cj["deflection_mm"] = p.clamp.deflections[i].deflection;
        contacts.push_back(std::move(cj));
    }
    json overlap = json::array();
    for (const auto& q : p.overlap_pins) overlap.push_back(pin_json(q));
    json j = {{"id", p.id}, {"memorized_pins", p.memorized_pins}, {"overlap_pins", std::move(overlap)}};
    const json verdict = to_json(p.verdict);
    for (const auto& [k, v] : verdict.items()) j[k] = v;
    j["contacts"] = std::move(contacts);
    j["settled_pose"] = pose_json(p.clamp.settled_pose);
    j["elastic_energy"] = p.clamp.elastic_energy;
    j["travel_mm"] = p.clamp.travel;
    j["hold_travel_mm"] = p.clamp.hold_travel ? json(*p.clamp.hold_travel) : json(nullptr);
    j["settle_on_boundary"] = p.clamp.settle_on_boundary;
    return j;
}

inline json to_json(const SweepResult& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"d_mm", r.d},
                        {"c", r.contact_count},
                        {"gn_rank", r.gn_rank},
                        {"rank_ok", r.rank_condition_met},
                        {"form_closure", r.form_closure}});
    return {{"rows", std::move(rows)},
            {"threshold_mm", s.threshold ? json(*s.threshold) : json(nullptr)},
            {"inversions", s.inversions}};
}

inline json to_json(const PinGrid& grid, const ScenarioReport& r) {
    json retracted = json::array();
    for (std::size_t i = 0; i < r.config.states.size(); ++i)
        if (r.config.states[i] == PinState::retracted) retracted.push_back(pin_json(grid.unflat(i)));
    json parts = json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    json j = {{"version", schema_version}, {"retracted_pins", std::move(retracted)}, {"parts", std::move(parts)}};
    if (r.sweep) j["sweep"] = to_json(*r.sweep);
    return j;
}

inline std::string report_text(const Scenario& s, const ScenarioReport& r) { return to_json(s.grid, r).dump(2) + "\n"; }

inline std::string sweep_csv(const SweepResult& s) {
    std::string out = "d_mm,c,gn_rank,rank_ok,form_closure\n";
    for (const auto& r : s.rows) {
        out += json(r.d).dump() + "," + std::to_string(r.contact_count) + "," + std::to_string(r.gn_rank) + "," +
               (r.rank_condition_met ? "1" : "0") + "," + (r.form_closure ? "1" : "0") + "\n";
    }
    return out;
}

inline json error_json(const std::string& code, const std::string& message, const std::string& path = "") {
    return {{"code", code}, {"message", message}, {"path", path}};
}

inline json error_json(const ValidationError& e) {
    json j = error_json("validation_error", e.issues.empty() ? e.what() : e.issues.front().message,
                        e.issues.empty() ? "" : e.issues.front().path);
    json list = json::array();
    for (const auto& i : e.issues) list.push_back({{"path", i.path}, {"message", i.message}});
    j["issues"] = std::move(list);
    return j;
}

}  // namespace pinfix::io
