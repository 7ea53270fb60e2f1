#pragma once

#include <vector>

#include "snnrpn/types.hpp"

namespace snnrpn {

struct WindowIndex {
    int row = 0;
    int col = 0;

    friend bool operator==(const WindowIndex&, const WindowIndex&) = default;
    friend auto operator<=>(const WindowIndex&, const WindowIndex&) = default;
};

// Layout of the convolution windows over the sensor. Origins sit at multiples
// of the stride wherever a full window fits; if pixels remain uncovered at the
// far edge, one more origin is clamped to (extent - window).
class ConvGeometry {
public:
    // Throws ConfigError if the layout cannot cover every pixel with between
    // one and four windows.
    ConvGeometry(SensorGeometry sensor, int window, int stride);

    int window() const { return window_; }
    int stride() const { return stride_; }
    int rows() const { return static_cast<int>(row_origins_.size()); }
    int cols() const { return static_cast<int>(col_origins_.size()); }
    const SensorGeometry& sensor() const { return sensor_; }
    const std::vector<int>& row_origins() const { return row_origins_; }
    const std::vector<int>& col_origins() const { return col_origins_; }

    Box window_box(WindowIndex w) const;

    // All windows covering pixel (x, y), row-major. Throws std::out_of_range
    // for pixels off the sensor.
    std::vector<WindowIndex> map_pixel_to_windows(int x, int y) const;

    // Same as above without allocating; returns the count written (1..4).
    int map_pixel_to_windows(int x, int y, WindowIndex (&out)[4]) const;

private:
    SensorGeometry sensor_;
    int window_;
    int stride_;
    std::vector<int> row_origins_;
    std::vector<int> col_origins_;
    // Per-pixel window ranges along each axis: first index and count (1 or 2).
    std::vector<int> row_first_;
    std::vector<int> row_count_;
    std::vector<int> col_first_;
    std::vector<int> col_count_;
};

}  // namespace snnrpn
