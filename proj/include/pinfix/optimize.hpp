#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace pinfix::optimize {

template <std::size_t N>
using Point = std::array<double, N>;

template <std::size_t N>
struct Minimum {
    Point<N> x{};
    double value = 0.0;
    int evaluations = 0;
};

struct SimplexOptions {
    double initial_step = 0.5;
    double x_tolerance = 1e-11;
    double f_tolerance = 1e-16;
    int max_evaluations = 20000;
    int max_restarts = 6;
};

/// Nelder-Mead downhill simplex with restarts from the best vertex. A restart
/// that fails to improve the minimum ends the search.
template <std::size_t N, class F>
Minimum<N> nelder_mead(F&& f, Point<N> start, const SimplexOptions& opt = {}) {
    Minimum<N> best{start, f(start), 1};
    double step = opt.initial_step;

    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        std::array<Point<N>, N + 1> s;
        std::array<double, N + 1> v;
        s[0] = best.x;
        v[0] = best.value;
        for (std::size_t i = 0; i < N; ++i) {
            s[i + 1] = best.x;
            s[i + 1][i] += step;
            v[i + 1] = f(s[i + 1]);
            ++best.evaluations;
        }

        while (best.evaluations < opt.max_evaluations) {
            std::array<std::size_t, N + 1> order;
            for (std::size_t i = 0; i <= N; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
            const std::size_t lo = order[0];
            const std::size_t hi = order[N];
            const std::size_t second = order[N - 1];

            double size = 0.0;
            for (std::size_t i = 0; i <= N; ++i)
                for (std::size_t k = 0; k < N; ++k) size = std::max(size, std::abs(s[i][k] - s[lo][k]));
            if (size < opt.x_tolerance && v[hi] - v[lo] <= opt.f_tolerance * (1.0 + std::abs(v[lo]))) break;

            Point<N> centroid{};
            for (std::size_t i = 0; i <= N; ++i) {
                if (i == hi) continue;
                for (std::size_t k = 0; k < N; ++k) centroid[k] += s[i][k] / static_cast<double>(N);
            }
            auto along = [&](double t) {
                Point<N> p;
                for (std::size_t k = 0; k < N; ++k) p[k] = centroid[k] + t * (s[hi][k] - centroid[k]);
                return p;
            };
            auto eval = [&](const Point<N>& p) {
                ++best.evaluations;
                return f(p);
            };

            const Point<N> reflected = along(-1.0);
            const double fr = eval(reflected);
            if (fr < v[lo]) {
                const Point<N> expanded = along(-2.0);
                const double fe = eval(expanded);
                if (fe < fr) {
                    s[hi] = expanded;
                    v[hi] = fe;
                } else {
                    s[hi] = reflected;
                    v[hi] = fr;
                }
            } else if (fr < v[second]) {
                s[hi] = reflected;
                v[hi] = fr;
            } else {
                const bool outside = fr < v[hi];
                const Point<N> contracted = along(outside ? -0.5 : 0.5);
                const double fc = eval(contracted);
                if (fc < (outside ? fr : v[hi])) {
                    s[hi] = contracted;
                    v[hi] = fc;
                } else {
                    for (std::size_t i = 0; i <= N; ++i) {
                        if (i == lo) continue;
                        for (std::size_t k = 0; k < N; ++k) s[i][k] = s[lo][k] + 0.5 * (s[i][k] - s[lo][k]);
                        v[i] = eval(s[i]);
                    }
                }
            }
        }

        const std::size_t lo = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
        const bool improved = v[lo] < best.value;
        if (v[lo] <= best.value) {
            best.x = s[lo];
            best.value = v[lo];
        }
        if ((!improved && restart > 0) || best.evaluations >= opt.max_evaluations) break;
        step = std::max(step * 0.1, 1e-6);
    }
    return best;
}

}  // namespace pinfix::optimize
