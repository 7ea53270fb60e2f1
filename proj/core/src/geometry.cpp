#include "snnrpn/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace snnrpn {

void SensorGeometry::validate() const {
    if (height <= 0 || width <= 0) {
        throw ConfigError("sensor dimensions must be positive");
    }
}

Box bounding_box(const Box& a, const Box& b) {
    return Box{std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
               std::max(a.y1, b.y1)};
}

std::int64_t intersection_area(const Box& a, const Box& b) {
    const int w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const int h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (w <= 0 || h <= 0) {
        return 0;
    }
    return static_cast<std::int64_t>(w) * h;
}

namespace {

std::vector<int> axis_origins(int extent, int window, int stride) {
    std::vector<int> origins;
    for (int o = 0; o + window <= extent; o += stride) {
        origins.push_back(o);
    }
    if (origins.back() + window < extent) {
        origins.push_back(extent - window);
    }
    return origins;
}

// Fills first/count per coordinate and checks each pixel sees 1 or 2 windows.
void axis_cover(const std::vector<int>& origins, int extent, int window, const char* axis,
                std::vector<int>& first, std::vector<int>& count) {
    first.assign(static_cast<std::size_t>(extent), -1);
    count.assign(static_cast<std::size_t>(extent), 0);
    for (int i = 0; i < static_cast<int>(origins.size()); ++i) {
        for (int p = origins[i]; p < origins[i] + window; ++p) {
            if (first[p] < 0) {
                first[p] = i;
            }
            ++count[p];
        }
    }
    for (int p = 0; p < extent; ++p) {
        if (count[p] < 1 || count[p] > 2) {
            throw ConfigError(std::string("window layout covers ") + axis + " coordinate " +
                              std::to_string(p) + " by " + std::to_string(count[p]) +
                              " windows (need 1 or 2)");
        }
    }
}

}  // namespace

ConvGeometry::ConvGeometry(SensorGeometry sensor, int window, int stride)
    : sensor_(sensor), window_(window), stride_(stride) {
    sensor_.validate();
    if (window <= 0 || stride <= 0) {
        throw ConfigError("window and stride must be positive");
    }
    if (stride > window) {
        throw ConfigError("stride larger than window leaves gaps");
    }
    if (2 * stride < window) {
        throw ConfigError("window overlap must not exceed half the window (stride >= window/2)");
    }
    if (window > sensor.height || window > sensor.width) {
        throw ConfigError("window larger than sensor");
    }
    row_origins_ = axis_origins(sensor.height, window, stride);
    col_origins_ = axis_origins(sensor.width, window, stride);
    axis_cover(row_origins_, sensor.height, window, "row", row_first_, row_count_);
    axis_cover(col_origins_, sensor.width, window, "column", col_first_, col_count_);
}

Box ConvGeometry::window_box(WindowIndex w) const {
    const int x0 = col_origins_.at(static_cast<std::size_t>(w.col));
    const int y0 = row_origins_.at(static_cast<std::size_t>(w.row));
    return Box{x0, y0, x0 + window_, y0 + window_};
}

int ConvGeometry::map_pixel_to_windows(int x, int y, WindowIndex (&out)[4]) const {
    if (!sensor_.contains(x, y)) {
        throw std::out_of_range("pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                ") outside sensor");
    }
    int n = 0;
    const int r0 = row_first_[y];
    const int c0 = col_first_[x];
    for (int r = r0; r < r0 + row_count_[y]; ++r) {
        for (int c = c0; c < c0 + col_count_[x]; ++c) {
            out[n++] = WindowIndex{r, c};
        }
    }
    return n;
}

std::vector<WindowIndex> ConvGeometry::map_pixel_to_windows(int x, int y) const {
    WindowIndex buf[4];
    const int n = map_pixel_to_windows(x, y, buf);
    return std::vector<WindowIndex>(buf, buf + n);
}

}  // namespace snnrpn
