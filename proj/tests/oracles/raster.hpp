#pragma once

// Pixel-level reference implementations: overlap by enumerating covered
// pixels and box clustering by labelling an 8-connected raster.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "snnrpn/types.hpp"

namespace oracle {

inline std::int64_t pixels_in_both(const snnrpn::Box& a, const snnrpn::Box& b) {
    std::int64_t n = 0;
    for (int y = a.y0; y < a.y1; ++y) {
        for (int x = a.x0; x < a.x1; ++x) {
            if (x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1) {
                ++n;
            }
        }
    }
    return n;
}

inline std::int64_t pixels_in_either(const snnrpn::Box& a, const snnrpn::Box& b) {
    std::set<std::pair<int, int>> px;
    for (const auto* box : {&a, &b}) {
        for (int y = box->y0; y < box->y1; ++y) {
            for (int x = box->x0; x < box->x1; ++x) {
                px.insert({x, y});
            }
        }
    }
    return static_cast<std::int64_t>(px.size());
}

inline double pixel_iou(const snnrpn::Box& a, const snnrpn::Box& b) {
    return static_cast<double>(pixels_in_both(a, b)) /
           static_cast<double>(pixels_in_either(a, b));
}

inline double pixel_fitness(const snnrpn::Box& p, const snnrpn::Box& g) {
    std::int64_t g_px = 0;
    for (int y = g.y0; y < g.y1; ++y) {
        for (int x = g.x0; x < g.x1; ++x) {
            ++g_px;
        }
    }
    return static_cast<double>(pixels_in_both(p, g)) / static_cast<double>(g_px);
}

namespace detail {

struct Uf {
    std::vector<int> parent;
    explicit Uf(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }
};

// One round: rasterize, label 8-connected components, take each component's
// bounding box. Boxes are half-open pixel ranges inside [0, extent).
inline std::vector<snnrpn::Box> raster_round(const std::vector<snnrpn::Box>& boxes, int width,
                                             int height) {
    std::vector<char> on(static_cast<std::size_t>(width * height), 0);
    for (const auto& b : boxes) {
        for (int y = b.y0; y < b.y1; ++y) {
            for (int x = b.x0; x < b.x1; ++x) {
                on[static_cast<std::size_t>(y * width + x)] = 1;
            }
        }
    }
    Uf uf(width * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!on[static_cast<std::size_t>(y * width + x)]) {
                continue;
            }
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= width || ny >= height) {
                        continue;
                    }
                    if (on[static_cast<std::size_t>(ny * width + nx)]) {
                        uf.unite(y * width + x, ny * width + nx);
                    }
                }
            }
        }
    }
    std::vector<int> root_of;
    std::vector<snnrpn::Box> out;
    std::vector<int> slot(static_cast<std::size_t>(width * height), -1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!on[static_cast<std::size_t>(y * width + x)]) {
                continue;
            }
            const int r = uf.find(y * width + x);
            auto& s = slot[static_cast<std::size_t>(r)];
            if (s < 0) {
                s = static_cast<int>(out.size());
                out.push_back({x, y, x + 1, y + 1});
            } else {
                auto& b = out[static_cast<std::size_t>(s)];
                b = {std::min(b.x0, x), std::min(b.y0, y), std::max(b.x1, x + 1),
                     std::max(b.y1, y + 1)};
            }
        }
    }
    return out;
}

}  // namespace detail

// Components are merged into bounding boxes until the set stops changing.
inline std::vector<snnrpn::Box> raster_cluster(const std::vector<snnrpn::Box>& boxes, int width,
                                               int height) {
    auto cur = detail::raster_round(boxes, width, height);
    while (true) {
        auto next = detail::raster_round(cur, width, height);
        if (next.size() == cur.size()) {
            cur = std::move(next);
            break;
        }
        cur = std::move(next);
    }
    std::sort(cur.begin(), cur.end(), [](const snnrpn::Box& a, const snnrpn::Box& b) {
        return std::tie(a.y0, a.x0, a.y1, a.x1) < std::tie(b.y0, b.x0, b.y1, b.x1);
    });
    return cur;
}

}  // namespace oracle
