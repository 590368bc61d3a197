#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "pinfix/error.hpp"
#include "pinfix/geometry.hpp"
#include "pinfix/lp.hpp"

namespace pinfix {

struct PinIndex {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const PinIndex&, const PinIndex&) = default;
};

/// Frictionless point contact: location on the part contour and the unit normal
/// pointing into the part.
struct Contact {
    Vec2 point;
    Vec2 normal;
    std::optional<PinIndex> pin;

    friend bool operator==(const Contact&, const Contact&) = default;
};

using ContactSet = std::vector<Contact>;

/// Planar rigid-body velocity of the part.
struct Twist {
    Vec2 v;
    double w = 0.0;
};

struct ClosureVerdict {
    int contact_count = 0;
    int gn_rank = 0;
    bool rank_condition_met = false;
    /// LP route: optimal positive-span depth, clamped to [-1, 1/c].
    /// Sampling route: minus the best escape score (positive iff no escape found).
    double lp_margin = 0.0;
    bool form_closure = false;
    std::optional<Twist> escape_twist;
};

struct ClosureOptions {
    /// Torque origin; the mean contact point when unset.
    std::optional<Vec2> reference;
    /// Length scale mixing v and w; the contact set's bounding radius when unset.
    std::optional<double> characteristic_radius;
    double margin_tolerance = 1e-9;
    double rank_tolerance = 1e-12;
};

inline constexpr int min_form_closure_contacts = 4;

/// Columns of G N: (n_x, n_y, (p - reference) x n) per contact.
inline std::vector<Eigen::Vector3d> build_contact_wrenches(std::span<const Contact> contacts,
                                                           Vec2 reference = {}) {
    std::vector<Eigen::Vector3d> w;
    w.reserve(contacts.size());
    for (const auto& c : contacts)
        w.emplace_back(c.normal.x, c.normal.y, cross(c.point - reference, c.normal));
    return w;
}

namespace detail {

inline Eigen::MatrixXd wrench_matrix(std::span<const Eigen::Vector3d> wrenches) {
    Eigen::MatrixXd m(3, static_cast<Eigen::Index>(wrenches.size()));
    for (std::size_t i = 0; i < wrenches.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = wrenches[i];
    return m;
}

inline int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double threshold = s(0) * static_cast<double>(m.cols()) * rel_tol;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++rank;
    return rank;
}

struct ResolvedFrame {
    Vec2 reference;
    double rho = 1.0;
};

inline ResolvedFrame resolve_frame(std::span<const Contact> contacts, const ClosureOptions& opt) {
    ResolvedFrame f;
    if (opt.reference) {
        f.reference = *opt.reference;
    } else if (!contacts.empty()) {
        for (const auto& c : contacts) f.reference += c.point;
        f.reference = f.reference / static_cast<double>(contacts.size());
    }
    if (opt.characteristic_radius) {
        if (!(*opt.characteristic_radius > 0.0))
            throw ArgumentError("characteristic radius must be positive");
        f.rho = *opt.characteristic_radius;
    } else {
        double r = 0.0;
        for (const auto& c : contacts) r = std::max(r, distance(c.point, f.reference));
        f.rho = r > 0.0 ? r : 1.0;
    }
    return f;
}

/// Wrenches with torque divided by rho, so twists live in (v, rho * w) space.
inline std::vector<Eigen::Vector3d> scaled_wrenches(std::span<const Contact> contacts,
                                                    const ResolvedFrame& f) {
    auto w = build_contact_wrenches(contacts, f.reference);
    for (auto& x : w) x(2) /= f.rho;
    return w;
}

inline Twist unscale_twist(Eigen::Vector3d v, double rho) {
    const double n = v.norm();
    if (n > 0.0) v /= n;
    return {{v(0), v(1)}, v(2) / rho};
}

inline double escape_score(std::span<const Eigen::Vector3d> w, const Eigen::Vector3d& v) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& x : w) s = std::min(s, x.dot(v));
    return s;
}

}  // namespace detail

/// Running tally of the necessity chain over every verdict produced in-process:
/// form_closure implies at least four contacts and a full-row-rank G N.
struct VerdictAudit {
    std::atomic<long> verdicts{0};
    std::atomic<long> violations{0};

    void record(const ClosureVerdict& v) {
        ++verdicts;
        const bool chain_ok = !v.form_closure ||
                              (v.contact_count >= min_form_closure_contacts && v.gn_rank == 3 &&
                               v.rank_condition_met);
        const bool witness_ok = v.escape_twist.has_value() == (!v.form_closure && v.contact_count > 0);
        if (!chain_ok || !witness_ok) ++violations;
    }
};

inline VerdictAudit& verdict_audit() {
    static VerdictAudit audit;
    return audit;
}

/// Numerical rank of the 3 x c matrix G N; threshold sigma_max * c * rel_tol.
inline int gn_rank(std::span<const Contact> contacts, Vec2 reference = {}, double rel_tol = 1e-12) {
    const auto w = build_contact_wrenches(contacts, reference);
    return detail::numerical_rank(detail::wrench_matrix(w), rel_tol);
}

/// First-order form closure by linear programming.
///
/// The wrench set positively spans R^3 iff it has rank 3 and some strictly
/// positive combination sums to zero. The LP maximizes eps subject to
/// sum(l_i w_i) = 0, sum(l_i) = 1, l_i >= eps (eps >= -1); lp_margin is the
/// optimum. When closure fails, the escape twist comes from a second LP over
/// twists: maximize sum(w_i . V) with w_i . V >= 0 inside the unit box, or from
/// the null space of (G N)^T when the rank condition already fails.
inline ClosureVerdict form_closure_lp(std::span<const Contact> contacts,
                                      const ClosureOptions& opt = {}) {
    const auto frame = detail::resolve_frame(contacts, opt);
    const auto w = detail::scaled_wrenches(contacts, frame);
    const std::size_t c = w.size();

    ClosureVerdict verdict;
    verdict.contact_count = static_cast<int>(c);
    const Eigen::MatrixXd m = detail::wrench_matrix(w);
    verdict.gn_rank = gn_rank(contacts, frame.reference, opt.rank_tolerance);
    verdict.rank_condition_met = verdict.gn_rank == 3;

    if (c == 0) {
        verdict.lp_margin = -1.0;
        verdict_audit().record(verdict);
        return verdict;
    }

    // Positive-span depth. Variables: mu_i = l_i - eps >= 0, e = eps + 1 >= 0.
    {
        lp::Problem p;
        p.objective.assign(c + 1, 0.0);
        p.objective[c] = 1.0;
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        for (const auto& x : w) sum += x;
        for (int k = 0; k < 3; ++k) {
            lp::Constraint con;
            con.coefficients.resize(c + 1);
            for (std::size_t i = 0; i < c; ++i) con.coefficients[i] = w[i](k);
            con.coefficients[c] = sum(k);
            con.sense = lp::Sense::equal;
            con.rhs = sum(k);
            p.constraints.push_back(std::move(con));
        }
        lp::Constraint total;
        total.coefficients.assign(c + 1, 1.0);
        total.coefficients[c] = static_cast<double>(c);
        total.sense = lp::Sense::equal;
        total.rhs = 1.0 + static_cast<double>(c);
        p.constraints.push_back(std::move(total));

        const auto sol = lp::maximize(p);
        switch (sol.status) {
        case lp::Status::optimal:
            verdict.lp_margin = sol.objective - 1.0;
            break;
        case lp::Status::infeasible:
            verdict.lp_margin = -1.0;
            break;
        default:
            throw IndeterminateError("positive-span LP did not converge");
        }
    }

    verdict.form_closure = static_cast<int>(c) >= min_form_closure_contacts &&
                           verdict.rank_condition_met && verdict.lp_margin > opt.margin_tolerance;

    if (!verdict.form_closure) {
        if (!verdict.rank_condition_met) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
            Eigen::Vector3d v = svd.matrixU().col(2);
            if (detail::escape_score(w, v) < detail::escape_score(w, -v)) v = -v;
            verdict.escape_twist = detail::unscale_twist(v, frame.rho);
        } else {
            // V = u - 1 with 0 <= u <= 2 (unit box).
            lp::Problem p;
            p.objective.assign(3, 0.0);
            for (const auto& x : w)
                for (int k = 0; k < 3; ++k) p.objective[k] += x(k);
            for (const auto& x : w) {
                lp::Constraint con;
                con.coefficients = {x(0), x(1), x(2)};
                con.sense = lp::Sense::greater_equal;
                con.rhs = x.sum();
                p.constraints.push_back(std::move(con));
            }
            for (int k = 0; k < 3; ++k) {
                lp::Constraint box;
                box.coefficients.assign(3, 0.0);
                box.coefficients[k] = 1.0;
                box.rhs = 2.0;
                p.constraints.push_back(std::move(box));
            }
            const auto sol = lp::maximize(p);
            if (sol.status == lp::Status::iteration_limit)
                throw IndeterminateError("escape-twist LP did not converge");
            Eigen::Vector3d v = Eigen::Vector3d::Zero();
            if (sol.status == lp::Status::optimal) v = {sol.x[0] - 1.0, sol.x[1] - 1.0, sol.x[2] - 1.0};
            if (v.norm() < 1e-12) {
                // Margin sits at the tolerance: report the least-violating wrench-pair ray.
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < c; ++i)
                    for (std::size_t j = i + 1; j < c; ++j)
                        for (double sgn : {1.0, -1.0}) {
                            const Eigen::Vector3d x = sgn * w[i].cross(w[j]);
                            if (x.norm() < 1e-12) continue;
                            const double s = detail::escape_score(w, x.normalized());
                            if (s > best) {
                                best = s;
                                v = x;
                            }
                        }
                if (v.norm() < 1e-12) v = Eigen::Vector3d::UnitX();
            }
            verdict.escape_twist = detail::unscale_twist(v, frame.rho);
        }
    }

    verdict_audit().record(verdict);
    return verdict;
}

/// Independent check of the same closure condition by exhaustive search over
/// twists: quasi-uniform samples on the unit sphere of (v, rho * w), followed by
/// every candidate extreme ray of the feasible twist cone (pairwise wrench cross
/// products and, for rank <= 1 sets, directions orthogonal to the wrenches).
/// Closure holds iff the best score min_i w_i . V stays below -delta.
inline ClosureVerdict form_closure_bruteforce(std::span<const Contact> contacts,
                                              const ClosureOptions& opt = {}, int samples = 20000,
                                              double delta = 1e-9) {
    if (samples < 1000) throw ArgumentError("brute-force closure needs at least 1000 samples");
    const auto frame = detail::resolve_frame(contacts, opt);
    const auto w = detail::scaled_wrenches(contacts, frame);

    ClosureVerdict verdict;
    verdict.contact_count = static_cast<int>(w.size());
    verdict.gn_rank = gn_rank(contacts, frame.reference, opt.rank_tolerance);
    verdict.rank_condition_met = verdict.gn_rank == 3;

    double best = -std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_v(1.0, 0.0, 0.0);
    auto consider = [&](Eigen::Vector3d v) {
        const double n = v.norm();
        if (!(n > 1e-12)) return;
        v /= n;
        const double s = detail::escape_score(w, v);
        if (s > best) {
            best = s;
            best_v = v;
        }
    };

    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < samples; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / samples;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        consider({r * std::cos(phi), r * std::sin(phi), z});
    }
    bool any_cross = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = i + 1; j < w.size(); ++j) {
            const Eigen::Vector3d x = w[i].cross(w[j]);
            if (x.norm() > 1e-12 * w[i].norm() * w[j].norm()) any_cross = true;
            consider(x);
            consider(-x);
        }
    }
    if (!any_cross && !w.empty()) {
        const Eigen::Vector3d a = w.front().normalized();
        const Eigen::Vector3d helper = std::abs(a(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
        const Eigen::Vector3d u = a.cross(helper);
        consider(u);
        consider(-u);
        consider(a.cross(u));
        consider(-a.cross(u));
    }

    verdict.form_closure = best < -delta;
    verdict.lp_margin = std::isfinite(best) ? -best : -1.0;
    if (!verdict.form_closure && !w.empty()) verdict.escape_twist = detail::unscale_twist(best_v, frame.rho);
    verdict_audit().record(verdict);
    return verdict;
}

}  // namespace pinfix
