#pragma once

// Brute-force one-to-one matching. Among all matchings that use only pairs
// at or above the threshold, returns the one whose edge list, sorted by
// (score descending, proposal, gt), is lexicographically best; a longer list
// wins when one is a prefix of the other.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <tuple>
#include <vector>

#include "snnrpn/eval.hpp"

namespace oracle {

inline bool edge_before(const snnrpn::eval::MatchPair& a, const snnrpn::eval::MatchPair& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return std::tie(a.proposal, a.gt) < std::tie(b.proposal, b.gt);
}

inline std::vector<snnrpn::eval::MatchPair> exhaustive_match(const std::vector<double>& scores,
                                                             std::size_t np, std::size_t ng,
                                                             double threshold) {
    using snnrpn::eval::MatchPair;
    std::vector<MatchPair> best;
    bool have_best = false;
    std::vector<MatchPair> cur;
    std::vector<bool> g_used(ng, false);

    auto better = [](std::vector<MatchPair> a, std::vector<MatchPair> b) {
        std::sort(a.begin(), a.end(), edge_before);
        std::sort(b.begin(), b.end(), edge_before);
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            if (edge_before(a[i], b[i])) {
                return true;
            }
            if (edge_before(b[i], a[i])) {
                return false;
            }
        }
        return a.size() > b.size();
    };

    std::function<void(std::size_t)> rec = [&](std::size_t p) {
        if (p == np) {
            if (!have_best || better(cur, best)) {
                best = cur;
                have_best = true;
            }
            return;
        }
        rec(p + 1);  // leave proposal p unmatched
        for (std::size_t g = 0; g < ng; ++g) {
            const double s = scores[p * ng + g];
            if (g_used[g] || s < threshold) {
                continue;
            }
            g_used[g] = true;
            cur.push_back({p, g, s});
            rec(p + 1);
            cur.pop_back();
            g_used[g] = false;
        }
    };
    rec(0);
    std::sort(best.begin(), best.end(), edge_before);
    return best;
}

}  // namespace oracle
