#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pinfix/closure.hpp"
#include "pinfix/error.hpp"
#include "pinfix/geometry.hpp"
#include "pinfix/optimize.hpp"

namespace pinfix {

/// How pins are split between the two crossing elements.
enum class ElementPartition { row_comb, column_comb, checkerboard };
enum class Element { a, b };

struct PinGrid {
    double pitch = 5.0;
    int rows = 2;
    int cols = 2;
    Vec2 origin;
    ElementPartition partition = ElementPartition::row_comb;
    /// Element A moves along +clamp_direction, element B along -clamp_direction.
    Vec2 clamp_direction{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
    double pin_stiffness = 1.0;  // N/mm

    void validate() const {
        if (!(pitch > 0.0) || !std::isfinite(pitch)) throw ArgumentError("pitch must be positive");
        if (rows < 2 || cols < 2) throw ArgumentError("grid needs at least 2 rows and 2 columns");
        if (!is_finite(origin)) throw ArgumentError("grid origin must be finite");
        if (std::abs(norm(clamp_direction) - 1.0) > 1e-9) throw ArgumentError("clamp direction must be a unit vector");
        if (!(pin_stiffness > 0.0) || !std::isfinite(pin_stiffness))
            throw ArgumentError("pin stiffness must be positive");
    }

    std::size_t pin_count() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    bool in_range(PinIndex p) const { return p.row >= 0 && p.row < rows && p.col >= 0 && p.col < cols; }
    std::size_t flat(PinIndex p) const {
        return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(p.col);
    }
    PinIndex unflat(std::size_t i) const {
        return {static_cast<int>(i / static_cast<std::size_t>(cols)), static_cast<int>(i % static_cast<std::size_t>(cols))};
    }

    Element element_of(PinIndex p) const {
        switch (partition) {
        case ElementPartition::row_comb: return p.row % 2 == 0 ? Element::a : Element::b;
        case ElementPartition::column_comb: return p.col % 2 == 0 ? Element::a : Element::b;
        case ElementPartition::checkerboard: break;
        }
        return (p.row + p.col) % 2 == 0 ? Element::a : Element::b;
    }

    /// Undisplaced pin location.
    Vec2 lattice_position(PinIndex p) const { return origin + Vec2{p.col * pitch, p.row * pitch}; }

    Box extent() const { return {origin, origin + Vec2{(cols - 1) * pitch, (rows - 1) * pitch}}; }

    friend bool operator==(const PinGrid&, const PinGrid&) = default;
};

enum class PinState : std::uint8_t { extended, retracted };

/// Memorized pin pattern plus the current offsets of the two elements.
struct PinConfig {
    std::vector<PinState> states;  // row-major
    double offset_a = 0.0;
    double offset_b = 0.0;

    static PinConfig all_extended(const PinGrid& grid) {
        return {std::vector<PinState>(grid.pin_count(), PinState::extended), 0.0, 0.0};
    }

    bool retracted(const PinGrid& grid, PinIndex p) const { return states[grid.flat(p)] == PinState::retracted; }
    std::size_t retracted_count() const {
        return static_cast<std::size_t>(std::count(states.begin(), states.end(), PinState::retracted));
    }

    /// Throws when the state array does not match the grid or when the relative
    /// offset makes two pins of different elements coincide.
    void validate(const PinGrid& grid) const {
        if (states.size() != grid.pin_count()) throw ArgumentError("pin state array does not match the grid");
        const Vec2 rel = grid.clamp_direction * ((offset_a - offset_b) / grid.pitch);
        const double mx = std::round(rel.x);
        const double my = std::round(rel.y);
        if (std::abs(rel.x - mx) > 1e-9 || std::abs(rel.y - my) > 1e-9 || (mx == 0.0 && my == 0.0)) return;
        const int dc = static_cast<int>(mx);
        const int dr = static_cast<int>(my);
        for (int r = 0; r < grid.rows; ++r)
            for (int c = 0; c < grid.cols; ++c) {
                const PinIndex a{r, c};
                const PinIndex b{r + dr, c + dc};
                if (grid.element_of(a) == Element::a && grid.in_range(b) && grid.element_of(b) == Element::b)
                    throw ArgumentError("element offsets make pins of different elements coincide");
            }
    }

    friend bool operator==(const PinConfig&, const PinConfig&) = default;
};

inline Vec2 pin_position(const PinGrid& grid, PinIndex p, const PinConfig& config) {
    if (!grid.in_range(p))
        throw ArgumentError("pin index (" + std::to_string(p.row) + ", " + std::to_string(p.col) + ") out of range");
    const double offset = grid.element_of(p) == Element::a ? config.offset_a : config.offset_b;
    return grid.lattice_position(p) + grid.clamp_direction * offset;
}

inline Vec2 pin_position(const PinGrid& grid, int row, int col, const PinConfig& config) {
    return pin_position(grid, PinIndex{row, col}, config);
}

/// Offsets for a relative travel between the elements, split symmetrically.
inline PinConfig with_travel(PinConfig config, double travel) {
    config.offset_a = 0.5 * travel;
    config.offset_b = -0.5 * travel;
    return config;
}

inline void require_in_bounds(const PinGrid& grid, const PlacedPart& part) {
    const Box b = bounding_box(part);
    const Box g = grid.extent();
    constexpr double eps = 1e-9;
    if (b.min.x < g.min.x - eps || b.min.y < g.min.y - eps || b.max.x > g.max.x + eps || b.max.y > g.max.y + eps)
        throw OutOfBoundsError(part.id, "part '" + part.id + "' extends beyond the pin grid");
}

/// Pins whose undisplaced position lies in the part footprint (contour included).
inline std::vector<PinIndex> footprint_pins(const PinGrid& grid, const PlacedPart& part) {
    const Box b = bounding_box(part);
    const int c0 = std::max(0, static_cast<int>(std::floor((b.min.x - grid.origin.x) / grid.pitch)));
    const int c1 = std::min(grid.cols - 1, static_cast<int>(std::ceil((b.max.x - grid.origin.x) / grid.pitch)));
    const int r0 = std::max(0, static_cast<int>(std::floor((b.min.y - grid.origin.y) / grid.pitch)));
    const int r1 = std::min(grid.rows - 1, static_cast<int>(std::ceil((b.max.y - grid.origin.y) / grid.pitch)));
    std::vector<PinIndex> pins;
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c)
            if (contains(part, grid.lattice_position({r, c}))) pins.push_back({r, c});
    return pins;
}

/// Shape-memorize step: pins under the footprint retract; earlier retractions stay.
inline PinConfig memorize(const PinGrid& grid, PinConfig config, const PlacedPart& part) {
    require_in_bounds(grid, part);
    if (config.states.size() != grid.pin_count()) throw ArgumentError("pin state array does not match the grid");
    for (const auto& p : footprint_pins(grid, part)) config.states[grid.flat(p)] = PinState::retracted;
    return config;
}

/// Pins inside both footprints, in row-major order.
inline std::vector<PinIndex> memorized_overlap(const PinGrid& grid, const PlacedPart& a, const PlacedPart& b) {
    require_in_bounds(grid, a);
    require_in_bounds(grid, b);
    std::vector<PinIndex> out;
    for (const auto& p : footprint_pins(grid, a))
        if (contains(b, grid.lattice_position(p))) out.push_back(p);
    return out;
}

struct PinDeflection {
    PinIndex pin;
    double deflection = 0.0;
};

/// Elastic pin-part interaction for one part against a fixed pin configuration.
/// Only extended pins near the part take part.
class ElasticModel {
public:
    ElasticModel(const PinGrid& grid, const PinConfig& config, const PlacedPart& part, double travel)
        : grid_(&grid), config_(&config), part_(&part), rho_(part.shape.bounding_radius()) {
        const double reach = rho_ + 2.0 * grid.pitch + std::abs(travel);
        const Vec2 c = part.centroid();
        for (std::size_t i = 0; i < grid.pin_count(); ++i) {
            if (config.states[i] != PinState::extended) continue;
            const PinIndex p = grid.unflat(i);
            if (distance(grid.lattice_position(p), c) <= reach) candidates_.push_back(p);
        }
        set_travel(travel);
    }

    /// Keeps only pins that can reach the part within the settle search region:
    /// any contour point moves at most two pitches there.
    void set_travel(double travel) {
        travel_ = travel;
        const PinConfig moved = with_travel(*config_, travel);
        const double reach = 2.0 * grid_->pitch + 1e-9;
        active_.clear();
        positions_.clear();
        for (const auto& p : candidates_) {
            const Vec2 q = pin_position(*grid_, p, moved);
            if (signed_distance(*part_, q) > reach) continue;
            active_.push_back(p);
            positions_.push_back(q);
        }
    }

    double travel() const { return travel_; }
    double characteristic_radius() const { return rho_; }
    const PlacedPart& part() const { return *part_; }
    const PinGrid& grid() const { return *grid_; }

    /// Sum over pins of k/2 * max(0, -signed_distance)^2.
    double energy(const Pose2& pose) const {
        double e = 0.0;
        const auto* poly = part_->shape.as_polygon();
        for (const auto& q : positions_) {
            if (poly) {
                const Vec2 local = pose.to_local(q);
                if (!poly->contains_even_odd(local)) continue;
                double d = 0.0;
                poly->closest(local, &d);
                e += d * d;
            } else {
                const double sd = signed_distance(part_->shape, pose, q);
                if (sd < 0.0) e += sd * sd;
            }
        }
        return 0.5 * grid_->pin_stiffness * e;
    }

    struct ContactReport {
        ContactSet contacts;
        std::vector<PinDeflection> deflections;
    };

    ContactReport contacts(const Pose2& pose, double tolerance = boundary_tolerance) const {
        ContactReport r;
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            const double sd = signed_distance(part_->shape, pose, positions_[i]);
            if (sd >= -tolerance) continue;
            const BoundaryPoint bp = closest_boundary_point(part_->shape, pose, positions_[i]);
            r.contacts.push_back({bp.point, bp.inner_normal, active_[i]});
            r.deflections.push_back({active_[i], -sd});
        }
        return r;
    }

private:
    const PinGrid* grid_;
    const PinConfig* config_;
    const PlacedPart* part_;
    double rho_;
    double travel_ = 0.0;
    std::vector<PinIndex> candidates_;
    std::vector<PinIndex> active_;
    std::vector<Vec2> positions_;
};

struct SettleResult {
    Pose2 pose;
    double energy = 0.0;
    double initial_energy = 0.0;
    /// The minimizer touches the search-radius limit.
    bool on_boundary = false;
};

struct SettleOptions {
    double x_tolerance = 1e-11;
    int max_restarts = 6;
    /// Also start from the lowest points of a quarter-pitch scan of the search
    /// region, so a shallow local minimum near the start does not win.
    bool scan_region = true;
    int scan_starts = 10;
};

/// Minimizer of the elastic energy over (dx, dy, dtheta) from `initial`.
/// Translation is bounded by one pitch, rotation by pitch / characteristic radius.
inline SettleResult settle_pose(const ElasticModel& model, const Pose2& initial, const SettleOptions& opt = {}) {
    const double pitch = model.grid().pitch;
    const double rho = model.characteristic_radius() > 0.0 ? model.characteristic_radius() : 1.0;
    auto pose_of = [&](const optimize::Point<3>& x) {
        return Pose2{initial.translation + Vec2{x[0], x[1]}, initial.rotation + x[2] / rho};
    };
    auto inside = [&](const optimize::Point<3>& x) { return std::hypot(x[0], x[1]) <= pitch && std::abs(x[2]) <= pitch; };
    // Outside the region: energy at the nearest region point plus a quadratic pull back.
    auto project = [&](optimize::Point<3> x) {
        const double t = std::hypot(x[0], x[1]);
        if (t > pitch) {
            x[0] *= pitch / t;
            x[1] *= pitch / t;
        }
        x[2] = std::clamp(x[2], -pitch, pitch);
        return x;
    };
    auto objective = [&](const optimize::Point<3>& x) {
        const auto p = project(x);
        const double excess = std::hypot(x[0] - p[0], x[1] - p[1], x[2] - p[2]);
        return model.energy(pose_of(p)) + model.grid().pin_stiffness * excess * excess;
    };

    SettleResult r;
    r.initial_energy = model.energy(initial);

    std::vector<optimize::Point<3>> starts{{0.0, 0.0, 0.0}};
    if (opt.scan_region && r.initial_energy > 0.0) {
        std::vector<std::pair<double, optimize::Point<3>>> scanned;
        const double h = 0.25 * pitch;
        for (int i = -4; i <= 4; ++i)
            for (int j = -4; j <= 4; ++j)
                for (int k = -4; k <= 4; ++k) {
                    const optimize::Point<3> x{i * h, j * h, k * h};
                    if ((i == 0 && j == 0 && k == 0) || !inside(x)) continue;
                    const double e = objective(x);
                    if (e < r.initial_energy) scanned.push_back({e, x});
                }
        const auto n = std::min<std::size_t>(scanned.size(), static_cast<std::size_t>(std::max(0, opt.scan_starts)));
        std::partial_sort(scanned.begin(), scanned.begin() + static_cast<std::ptrdiff_t>(n), scanned.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < n; ++i) starts.push_back(scanned[i].second);
    }

    optimize::SimplexOptions so;
    so.initial_step = 0.1 * pitch;
    so.x_tolerance = opt.x_tolerance;
    so.max_restarts = opt.max_restarts;
    std::optional<optimize::Minimum<3>> best;
    for (const auto& start : starts) {
        const auto m = optimize::nelder_mead<3>(objective, start, so);
        if (!best || m.value < best->value) best = m;
    }
    if (!std::isfinite(best->value)) throw Error("elastic energy is not finite");
    const auto x = project(best->x);
    const double e = model.energy(pose_of(x));
    if (e <= r.initial_energy) {
        r.pose = pose_of(x);
        r.energy = e;
    } else {
        r.pose = initial;
        r.energy = r.initial_energy;
    }
    r.on_boundary = std::hypot(x[0], x[1]) > pitch - 1e-6 || std::abs(x[2]) > pitch - 1e-6;
    return r;
}

inline SettleResult settle_pose(const PinGrid& grid, const PinConfig& config, const PlacedPart& part,
                                double travel, const Pose2& initial) {
    require_in_bounds(grid, part);
    const ElasticModel model(grid, config, part, travel);
    return settle_pose(model, initial);
}

enum class ClampMode {
    /// Elements close until the part is held (form closure at a settled pose
    /// inside the alignment region), then travel `displacement` further. A part
    /// that cannot be held within the stroke is clamped `displacement` past the
    /// first pinch.
    close_until_held,
    /// Elements travel exactly `displacement` relative to each other.
    fixed,
};

struct ClampOptions {
    double displacement = 2.0;
    ClampMode mode = ClampMode::close_until_held;
    bool settle = true;
    /// Longest relative travel searched while closing, in pitches.
    double stroke_pitches = 4.0;

    friend bool operator==(const ClampOptions&, const ClampOptions&) = default;
};

struct ClampResult {
    ContactSet contacts;
    std::vector<PinDeflection> deflections;  // contacting pins only
    Pose2 settled_pose;
    double elastic_energy = 0.0;
    /// Relative element travel at which contacts were enumerated.
    double travel = 0.0;
    /// Travel at which the part first became held; unset when it never did.
    std::optional<double> hold_travel;
    bool settle_on_boundary = false;
};

/// Reference point and length scale for closure analysis of a settled part.
inline ClosureOptions closure_frame(const PlacedPart& part, const Pose2& settled) {
    ClosureOptions o;
    o.reference = settled.apply(part.shape.centroid());
    o.characteristic_radius = part.shape.bounding_radius();
    return o;
}

namespace detail {

/// Smallest travel at which the part can no longer slip free of the extended
/// pins (positive elastic energy after settling).
inline std::optional<double> pinch_travel(ElasticModel& model, double max_travel) {
    const PlacedPart& part = model.part();
    const double pitch = model.grid().pitch;
    const double loose = 1e-12 * model.grid().pin_stiffness * pitch * pitch;
    SettleOptions quick;
    quick.x_tolerance = 1e-8;
    quick.max_restarts = 1;
    quick.scan_region = false;
    auto pinched = [&](double t) {
        model.set_travel(t);
        return settle_pose(model, part.pose, quick).energy > loose;
    };
    if (!pinched(max_travel)) return std::nullopt;
    double lo = 0.0;
    double hi = max_travel;
    while (hi - lo > 1e-4 * pitch) {
        const double mid = 0.5 * (lo + hi);
        (pinched(mid) ? hi : lo) = mid;
    }
    return hi;
}

inline bool held_at(ElasticModel& model, double travel) {
    model.set_travel(travel);
    SettleOptions quick;
    quick.x_tolerance = 1e-8;
    quick.max_restarts = 1;
    quick.scan_region = false;
    const SettleResult s = settle_pose(model, model.part().pose, quick);
    if (s.on_boundary) return false;
    const auto report = model.contacts(s.pose);
    if (static_cast<int>(report.contacts.size()) < min_form_closure_contacts) return false;
    return form_closure_lp(report.contacts, closure_frame(model.part(), s.pose)).form_closure;
}

/// First travel in [from, to] at which the part is held, scanning in quarter-pitch
/// steps and refining by bisection.
inline std::optional<double> hold_travel(ElasticModel& model, double from, double to) {
    const double pitch = model.grid().pitch;
    const double step = 0.25 * pitch;
    double prev = from;
    for (double t = from;; t += step) {
        t = std::min(t, to);
        if (held_at(model, t)) {
            double lo = prev;
            double hi = t;
            if (hi == from) return hi;
            while (hi - lo > 1e-3 * pitch) {
                const double mid = 0.5 * (lo + hi);
                (held_at(model, mid) ? hi : lo) = mid;
            }
            return hi;
        }
        if (t >= to) return std::nullopt;
        prev = t;
    }
}

}  // namespace detail

/// Batch-clamping step for one memorized part against a shared configuration.
/// Contacts are enumerated at the settled pose.
inline ClampResult clamp(const PinGrid& grid, const PinConfig& config, const PlacedPart& part,
                         const ClampOptions& opt = {}) {
    grid.validate();
    require_in_bounds(grid, part);
    if (config.states.size() != grid.pin_count()) throw ArgumentError("pin state array does not match the grid");
    if (!(opt.displacement >= 0.0) || !(opt.displacement < grid.pitch))
        throw ArgumentError("clamp displacement must lie in [0, pitch)");
    if (!(opt.stroke_pitches > 0.0)) throw ArgumentError("clamp stroke must be positive");

    ClampResult result;
    ElasticModel model(grid, config, part, 0.0);
    if (opt.mode == ClampMode::fixed) {
        result.travel = opt.displacement;
    } else {
        const double stroke = opt.stroke_pitches * grid.pitch;
        const auto pinch = detail::pinch_travel(model, stroke);
        if (pinch) result.hold_travel = detail::hold_travel(model, *pinch, stroke);
        if (result.hold_travel) result.travel = *result.hold_travel + opt.displacement;
        else if (pinch) result.travel = std::min(*pinch + opt.displacement, stroke);
        else result.travel = stroke;
    }
    with_travel(config, result.travel).validate(grid);
    model.set_travel(result.travel);

    if (opt.settle) {
        // Local equilibrium only: clamping is quasi-static, so the part cannot
        // jump over an energy barrier to a lower minimum elsewhere in the region.
        SettleOptions local;
        local.scan_region = false;
        const SettleResult s = settle_pose(model, part.pose, local);
        result.settled_pose = s.pose;
        result.elastic_energy = s.energy;
        result.settle_on_boundary = s.on_boundary;
    } else {
        result.settled_pose = part.pose;
        result.elastic_energy = model.energy(part.pose);
    }
    auto report = model.contacts(result.settled_pose);
    result.contacts = std::move(report.contacts);
    result.deflections = std::move(report.deflections);
    return result;
}

}  // namespace pinfix
