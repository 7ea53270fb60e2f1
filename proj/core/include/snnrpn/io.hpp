#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snnrpn/pipeline.hpp"
#include "snnrpn/types.hpp"

// CSV interchange formats and frame rendering.
//
//   events:          t_us,x,y,p          (p is 0 or 1, rows ascending in t_us)
//   boxes:           frame,x0,y0,x1,y1[,id]
//
// Readers reject malformed input with the 1-based line number; writers are
// byte-deterministic.
namespace snnrpn::io {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::vector<DvsEvent> read_events(std::istream& in, const SensorGeometry& geometry,
                                  const std::string& source = "<stream>");
std::vector<DvsEvent> read_events(const std::filesystem::path& path,
                                  const SensorGeometry& geometry);
void write_events(std::ostream& out, std::span<const DvsEvent> events);
void write_events(const std::filesystem::path& path, std::span<const DvsEvent> events);

std::vector<GroundTruthBox> read_gt(std::istream& in, const std::string& source = "<stream>");
std::vector<GroundTruthBox> read_gt(const std::filesystem::path& path);
void write_gt(std::ostream& out, std::span<const GroundTruthBox> boxes);
void write_gt(const std::filesystem::path& path, std::span<const GroundTruthBox> boxes);

// Same schema as ground truth, without the id column; readable by read_gt.
void write_proposals(std::ostream& out, std::span<const FrameProposals> frames);
void write_proposals(const std::filesystem::path& path, std::span<const FrameProposals> frames);

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

class Image {
public:
    Image(int width, int height) : width_(width), height_(height), px_(width * height) {}

    int width() const { return width_; }
    int height() const { return height_; }
    const Rgb& at(int x, int y) const { return px_[static_cast<std::size_t>(y) * width_ + x]; }
    Rgb& at(int x, int y) { return px_[static_cast<std::size_t>(y) * width_ + x]; }

    // Binary PPM (P6), maxval 255.
    std::string to_ppm() const;

private:
    int width_;
    int height_;
    std::vector<Rgb> px_;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kRed{255, 0, 0};
inline constexpr Rgb kGreen{0, 255, 0};

// Events white on black, ground-truth outlines green, proposal outlines red
// (drawn last). Boxes are clipped to the sensor.
Image render_frame(std::span<const DvsEvent> events, std::span<const Box> proposals,
                   const SensorGeometry& geometry, std::span<const Box> gt = {});

void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace snnrpn::io
