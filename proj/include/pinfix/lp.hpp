#pragma once

// Dense two-phase simplex for the small programs produced by closure analysis
// (a handful of rows, tens of columns). Bland's rule throughout, so no cycling.

#include <cmath>
#include <cstddef>
#include <vector>

namespace pinfix::lp {

enum class Sense { less_equal, equal, greater_equal };

struct Constraint {
    std::vector<double> coefficients;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
};

/// maximize objective . x  subject to constraints, x >= 0.
struct Problem {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
    Status status = Status::iteration_limit;
    double objective = 0.0;
    std::vector<double> x;
    int iterations = 0;
};

struct Options {
    int max_iterations = 5000;
    double tolerance = 1e-11;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double& objective(std::size_t c) { return at(rows_, c); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    /// Pivots until optimal. `usable` bounds the entering columns.
    Status optimize(std::size_t usable, const Options& opt, int& iterations,
                    const std::vector<bool>& dead_row) {
        while (true) {
            if (iterations >= opt.max_iterations) return Status::iteration_limit;
            std::size_t enter = usable;
            for (std::size_t c = 0; c < usable; ++c) {
                if (objective(c) < -opt.tolerance) {
                    enter = c;
                    break;
                }
            }
            if (enter == usable) return Status::optimal;

            std::size_t leave = rows_;
            double best_ratio = 0.0;
            for (std::size_t r = 0; r < rows_; ++r) {
                if (dead_row[r]) continue;
                const double a = at(r, enter);
                if (a <= opt.tolerance) continue;
                const double ratio = rhs(r) / a;
                if (leave == rows_ || ratio < best_ratio - opt.tolerance ||
                    (std::abs(ratio - best_ratio) <= opt.tolerance && basis_[r] < basis_[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            if (leave == rows_) return Status::unbounded;
            pivot(leave, enter);
            ++iterations;
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

inline Solution maximize(const Problem& problem, const Options& opt = {}) {
    const std::size_t n = problem.objective.size();
    const std::size_t m = problem.constraints.size();

    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    std::vector<Sense> senses(m);
    std::vector<double> signs(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        Sense s = problem.constraints[i].sense;
        if (problem.constraints[i].rhs < 0.0) {
            signs[i] = -1.0;
            if (s == Sense::less_equal) s = Sense::greater_equal;
            else if (s == Sense::greater_equal) s = Sense::less_equal;
        }
        senses[i] = s;
        if (s != Sense::equal) ++slack_count;
        if (s != Sense::less_equal) ++artificial_count;
    }

    const std::size_t first_slack = n;
    const std::size_t first_artificial = n + slack_count;
    detail::Tableau t(m, n + slack_count + artificial_count);
    std::size_t next_slack = first_slack;
    std::size_t next_artificial = first_artificial;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& con = problem.constraints[i];
        for (std::size_t j = 0; j < n && j < con.coefficients.size(); ++j)
            t.at(i, j) = signs[i] * con.coefficients[j];
        t.rhs(i) = signs[i] * con.rhs;
        switch (senses[i]) {
        case Sense::less_equal:
            t.at(i, next_slack) = 1.0;
            t.basis()[i] = next_slack++;
            break;
        case Sense::greater_equal:
            t.at(i, next_slack++) = -1.0;
            t.at(i, next_artificial) = 1.0;
            t.basis()[i] = next_artificial++;
            break;
        case Sense::equal:
            t.at(i, next_artificial) = 1.0;
            t.basis()[i] = next_artificial++;
            break;
        }
    }

    Solution sol;
    std::vector<bool> dead_row(m, false);

    // Phase 1: maximize -sum(artificials).
    if (artificial_count > 0) {
        for (std::size_t c = first_artificial; c < t.cols(); ++c) t.objective(c) = 1.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (t.basis()[r] < first_artificial) continue;
            for (std::size_t c = 0; c <= t.cols(); ++c) t.at(m, c) -= t.at(r, c);
        }
        sol.status = t.optimize(t.cols(), opt, sol.iterations, dead_row);
        if (sol.status == Status::iteration_limit) return sol;
        double infeasibility = 0.0;
        for (std::size_t r = 0; r < m; ++r)
            if (t.basis()[r] >= first_artificial) infeasibility += t.rhs(r);
        if (infeasibility > 1e-9) {
            sol.status = Status::infeasible;
            return sol;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        for (std::size_t r = 0; r < m; ++r) {
            if (t.basis()[r] < first_artificial) continue;
            std::size_t col = first_artificial;
            for (std::size_t c = 0; c < first_artificial; ++c) {
                if (std::abs(t.at(r, c)) > 1e-9) {
                    col = c;
                    break;
                }
            }
            if (col == first_artificial) dead_row[r] = true;
            else t.pivot(r, col);
        }
    }

    // Phase 2 over original and slack columns.
    for (std::size_t c = 0; c <= t.cols(); ++c) t.objective(c) = 0.0;
    for (std::size_t j = 0; j < n; ++j) t.objective(j) = -problem.objective[j];
    for (std::size_t r = 0; r < m; ++r) {
        if (dead_row[r]) continue;
        const double f = t.objective(t.basis()[r]);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= t.cols(); ++c) t.at(m, c) -= f * t.at(r, c);
    }
    sol.status = t.optimize(first_artificial, opt, sol.iterations, dead_row);
    if (sol.status != Status::optimal) return sol;

    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (!dead_row[r] && t.basis()[r] < n) sol.x[t.basis()[r]] = t.rhs(r);
    sol.objective = t.objective(t.cols());
    return sol;
}

}  // namespace pinfix::lp
