#pragma once

// SVG view of a scenario: pin lattice (filled = extended, hollow = retracted),
// contacting pins highlighted, part outlines and escape-twist arrows.

#include <cstdio>
#include <set>
#include <string>

#include "pinfix/experiments.hpp"

namespace pinfix {

struct RenderSpec {
    double scale = 2.0;        // px per mm
    double margin = 10.0;      // mm around the grid
    double pin_radius = 0.9;   // mm
    bool settled_outline = true;
    bool escape_arrows = true;
    double arrow_length = 15.0;  // mm
};

namespace detail {

inline std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", v);
    std::string s = b;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

inline std::string escape_xml(const std::string& in) {
    std::string out;
    for (const char c : in) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string outline_path(const PlacedPart& part, const Pose2& pose) {
    if (const auto* c = part.shape.as_circle()) {
        const Vec2 o = pose.translation;
        const double r = c->radius;
        return "M " + fmt(o.x - r) + " " + fmt(o.y) + " a " + fmt(r) + " " + fmt(r) + " 0 1 0 " + fmt(2 * r) + " 0 a " +
               fmt(r) + " " + fmt(r) + " 0 1 0 " + fmt(-2 * r) + " 0 Z";
    }
    std::string d;
    for (const auto& v : part.shape.as_polygon()->vertices()) {
        const Vec2 w = pose.apply(v);
        d += (d.empty() ? "M " : " L ") + fmt(w.x) + " " + fmt(w.y);
    }
    return d + " Z";
}

}  // namespace detail

/// `report` may be null; then only the memorized configuration is drawn.
inline std::string render_svg(const Scenario& s, const ScenarioReport* report, const RenderSpec& spec = {}) {
    using detail::fmt;
    const Box box = s.grid.extent();
    const double x0 = box.min.x - spec.margin;
    const double y0 = box.min.y - spec.margin;
    const double w = box.max.x - box.min.x + 2 * spec.margin;
    const double h = box.max.y - box.min.y + 2 * spec.margin;

    PinConfig config = PinConfig::all_extended(s.grid);
    if (report) config = report->config;
    else
        for (const auto& p : s.parts) config = memorize(s.grid, config, p);

    std::set<PinIndex> contact_pins;
    if (report)
        for (const auto& pr : report->parts)
            for (const auto& c : pr.clamp.contacts)
                if (c.pin) contact_pins.insert(*c.pin);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w * spec.scale) + "\" height=\"" +
           fmt(h * spec.scale) + "\" viewBox=\"" + fmt(x0) + " " + fmt(-(y0 + h)) + " " + fmt(w) + " " + fmt(h) + "\">\n";
    out += "<style>"
           ".pin{stroke:#333;stroke-width:0.3}.extended{fill:#333}.retracted{fill:none}"
           ".contact{fill:#d22;stroke:#d22}.part{fill:none;stroke:#06c;stroke-width:0.6}"
           ".settled{fill:none;stroke:#06c;stroke-width:0.4;stroke-dasharray:1.5 1}"
           ".held{stroke:#080}.free{stroke:#c60}.escape{stroke:#c60;stroke-width:0.8}"
           "</style>\n";
    out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
           "orient=\"auto\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#c60\"/></marker></defs>\n";
    // World y points up; flip once here.
    out += "<g transform=\"scale(1,-1)\">\n<g class=\"pins\">\n";
    for (int r = 0; r < s.grid.rows; ++r) {
        for (int c = 0; c < s.grid.cols; ++c) {
            const PinIndex p{r, c};
            const Vec2 q = s.grid.lattice_position(p);
            std::string cls = config.retracted(s.grid, p) ? "pin retracted" : "pin extended";
            if (contact_pins.contains(p)) cls += " contact";
            out += "<circle class=\"" + cls + "\" data-row=\"" + std::to_string(r) + "\" data-col=\"" +
                   std::to_string(c) + "\" cx=\"" + fmt(q.x) + "\" cy=\"" + fmt(q.y) + "\" r=\"" +
                   fmt(spec.pin_radius) + "\"/>\n";
        }
    }
    out += "</g>\n<g class=\"parts\">\n";
    for (std::size_t i = 0; i < s.parts.size(); ++i) {
        const auto& part = s.parts[i];
        const PartReport* pr = report && i < report->parts.size() ? &report->parts[i] : nullptr;
        std::string status;
        if (pr) status = pr->verdict.form_closure ? " held" : " free";
        const std::string id = detail::escape_xml(part.id);
        out += "<path class=\"part" + status + "\" data-id=\"" + id + "\" d=\"" + detail::outline_path(part, part.pose) +
               "\"/>\n";
        if (!pr) continue;
        if (spec.settled_outline && !(pr->clamp.settled_pose == part.pose))
            out += "<path class=\"settled\" data-id=\"" + id + "\" d=\"" +
                   detail::outline_path(part, pr->clamp.settled_pose) + "\"/>\n";
        if (spec.escape_arrows && pr->verdict.escape_twist) {
            const Vec2 from = pr->clamp.settled_pose.apply(part.shape.centroid());
            const Twist& t = *pr->verdict.escape_twist;
            Vec2 dir = t.v;
            // A pure rotation is drawn as the motion of the farthest point.
            if (norm(dir) < 1e-9) dir = Vec2{0.0, t.w * part.shape.bounding_radius()};
            if (norm(dir) > 0.0) {
                const Vec2 to = from + normalized(dir) * spec.arrow_length;
                out += "<line class=\"escape\" data-id=\"" + id + "\" x1=\"" + fmt(from.x) + "\" y1=\"" + fmt(from.y) +
                       "\" x2=\"" + fmt(to.x) + "\" y2=\"" + fmt(to.y) + "\" marker-end=\"url(#arrow)\"/>\n";
            }
        }
    }
    out += "</g>\n</g>\n</svg>\n";
    return out;
}

}  // namespace pinfix
