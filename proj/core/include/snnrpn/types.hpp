#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace snnrpn {

// Microseconds since sensor time zero.
using Timestamp = std::uint64_t;

enum class Polarity : std::uint8_t { Off = 0, On = 1 };

struct DvsEvent {
    Timestamp t = 0;
    int x = 0;  // column in [0, width)
    int y = 0;  // row in [0, height)
    Polarity polarity = Polarity::On;

    friend bool operator==(const DvsEvent&, const DvsEvent&) = default;
};

// Output of the refractory layer: a pixel that fired at time t.
struct PixelSpike {
    Timestamp t = 0;
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelSpike&, const PixelSpike&) = default;
};

struct SensorGeometry {
    int height = 180;
    int width = 240;

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    void validate() const;
};

// Half-open integer pixel rectangle [x0, x1) x [y0, y1).
struct Box {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    std::int64_t area() const {
        return static_cast<std::int64_t>(width()) * static_cast<std::int64_t>(height());
    }
    bool empty() const { return x1 <= x0 || y1 <= y0; }

    friend bool operator==(const Box&, const Box&) = default;
    friend auto operator<=>(const Box&, const Box&) = default;
};

Box bounding_box(const Box& a, const Box& b);
std::int64_t intersection_area(const Box& a, const Box& b);

struct ProposalBox {
    Box box;
    Timestamp t = 0;  // emission time

    friend bool operator==(const ProposalBox&, const ProposalBox&) = default;
};

struct GroundTruthBox {
    std::int64_t frame_index = 0;
    Box box;
    std::optional<std::int64_t> object_id;

    friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

// Raised when an event stream violates ordering or bounds. `index` is the
// zero-based position of the offending element.
class StreamError : public std::runtime_error {
public:
    StreamError(std::size_t index, const std::string& what)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace snnrpn
