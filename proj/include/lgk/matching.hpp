#pragma once

// Minimum-length non-crossing perfect matching of points in cyclic order.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lgk/errors.hpp"
#include "lgk/geometry.hpp"

namespace lgk {

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // i < j, sorted by i
    double cost = 0;
};

using PairFilter = std::function<bool(int, int)>;

/// Interval DP over non-crossing matchings: O(m³). `sign` (optional) holds ±1 per point and a pair
/// must join opposite signs; `allowed` (optional) excludes individual pairs. Among equal-cost
/// optima the lexicographically smallest partner sequence wins.
inline Matching min_noncrossing_matching(std::span<const Point> pts, std::span<const int> sign = {},
                                         const PairFilter& allowed = {}) {
    const int m = static_cast<int>(pts.size());
    if (m % 2) throw Error(ErrorKind::InfeasiblePolarity, "odd number of chord endpoints");
    if (m == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();
    double scale = 0;
    for (int i = 1; i < m; ++i) scale = std::max(scale, dist(pts[0], pts[i]));
    const double tie = 1e-12 * std::max(scale, 1e-300) * m;

    // M[i][j] for 0 <= i <= j+1 <= m; stored as (m+1)x(m+1), empty interval when j = i - 1
    std::vector<double> M((m + 1) * (m + 1), 0.0);
    std::vector<int> choice((m + 1) * (m + 1), -1);
    auto at = [&](int i, int j) -> double& { return M[i * (m + 1) + (j + 1)]; };
    auto ch = [&](int i, int j) -> int& { return choice[i * (m + 1) + (j + 1)]; };

    for (int len = 2; len <= m; len += 2) {
        for (int i = 0; i + len - 1 < m; ++i) {
            const int j = i + len - 1;
            double best = inf;
            int bk = -1;
            for (int k = i + 1; k <= j; k += 2) {
                if (!sign.empty() && sign[i] == sign[k]) continue;
                if (allowed && !allowed(i, k)) continue;
                const double inner = k - 1 >= i + 1 ? at(i + 1, k - 1) : 0.0;
                const double outer = k + 1 <= j ? at(k + 1, j) : 0.0;
                if (!std::isfinite(inner) || !std::isfinite(outer)) continue;
                const double c = dist(pts[i], pts[k]) + inner + outer;
                if (c < best - tie) {
                    best = c;
                    bk = k;
                }
            }
            at(i, j) = best;
            ch(i, j) = bk;
        }
    }
    if (!std::isfinite(at(0, m - 1)))
        throw Error(ErrorKind::InfeasiblePolarity, "no admissible non-crossing matching");

    Matching out;
    out.cost = at(0, m - 1);
    std::vector<std::pair<int, int>> stack{{0, m - 1}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        if (i > j) continue;
        const int k = ch(i, j);
        out.pairs.push_back({i, k});
        stack.push_back({k + 1, j});
        stack.push_back({i + 1, k - 1});
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

}  // namespace lgk
