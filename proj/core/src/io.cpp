#include "snnrpn/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace snnrpn::io {

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    }
    return f;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    return f;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_int(std::string_view s, T& value) {
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    while (!s.empty() && s.back() == ' ') {
        s.remove_suffix(1);
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

// The first line must equal one of `accepted`.
void read_header(std::istream& in, const std::string& source,
                 std::initializer_list<std::string_view> accepted) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source, 1, "missing header");
    }
    strip_cr(line);
    for (const auto& a : accepted) {
        if (line == a) {
            return;
        }
    }
    throw ParseError(source, 1, "unexpected header '" + line + "'");
}

}  // namespace

std::vector<DvsEvent> read_events(std::istream& in, const SensorGeometry& geometry,
                                  const std::string& source) {
    read_header(in, source, {"t_us,x,y,p"});
    std::vector<DvsEvent> events;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 4) {
            throw ParseError(source, lineno, "expected 4 fields, got " + std::to_string(f.size()));
        }
        DvsEvent ev;
        int p = 0;
        if (!parse_int(f[0], ev.t) || !parse_int(f[1], ev.x) || !parse_int(f[2], ev.y) ||
            !parse_int(f[3], p)) {
            throw ParseError(source, lineno, "malformed event '" + line + "'");
        }
        if (p != 0 && p != 1) {
            throw ParseError(source, lineno, "polarity must be 0 or 1");
        }
        ev.polarity = p == 1 ? Polarity::On : Polarity::Off;
        if (!geometry.contains(ev.x, ev.y)) {
            throw ParseError(source, lineno,
                             "pixel (" + std::to_string(ev.x) + "," + std::to_string(ev.y) +
                                 ") outside " + std::to_string(geometry.width) + "x" +
                                 std::to_string(geometry.height) + " sensor");
        }
        if (!events.empty() && ev.t < events.back().t) {
            throw ParseError(source, lineno,
                             "timestamp " + std::to_string(ev.t) + " precedes previous " +
                                 std::to_string(events.back().t));
        }
        events.push_back(ev);
    }
    return events;
}

std::vector<DvsEvent> read_events(const std::filesystem::path& path,
                                  const SensorGeometry& geometry) {
    auto f = open_in(path);
    return read_events(f, geometry, path.string());
}

void write_events(std::ostream& out, std::span<const DvsEvent> events) {
    out << "t_us,x,y,p\n";
    for (const auto& e : events) {
        out << e.t << ',' << e.x << ',' << e.y << ',' << (e.polarity == Polarity::On ? 1 : 0)
            << '\n';
    }
}

void write_events(const std::filesystem::path& path, std::span<const DvsEvent> events) {
    auto f = open_out(path);
    write_events(f, events);
}

std::vector<GroundTruthBox> read_gt(std::istream& in, const std::string& source) {
    read_header(in, source, {"frame,x0,y0,x1,y1", "frame,x0,y0,x1,y1,id"});
    std::vector<GroundTruthBox> boxes;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 5 && f.size() != 6) {
            throw ParseError(source, lineno,
                             "expected 5 or 6 fields, got " + std::to_string(f.size()));
        }
        GroundTruthBox g;
        if (!parse_int(f[0], g.frame_index) || !parse_int(f[1], g.box.x0) ||
            !parse_int(f[2], g.box.y0) || !parse_int(f[3], g.box.x1) ||
            !parse_int(f[4], g.box.y1)) {
            throw ParseError(source, lineno, "malformed box '" + line + "'");
        }
        if (f.size() == 6 && !f[5].empty()) {
            std::int64_t id = 0;
            if (!parse_int(f[5], id)) {
                throw ParseError(source, lineno, "malformed id '" + std::string(f[5]) + "'");
            }
            g.object_id = id;
        }
        if (g.frame_index < 0) {
            throw ParseError(source, lineno, "negative frame index");
        }
        if (g.box.x1 <= g.box.x0 || g.box.y1 <= g.box.y0) {
            throw ParseError(source, lineno, "inverted or empty box");
        }
        boxes.push_back(g);
    }
    return boxes;
}

std::vector<GroundTruthBox> read_gt(const std::filesystem::path& path) {
    auto f = open_in(path);
    return read_gt(f, path.string());
}

void write_gt(std::ostream& out, std::span<const GroundTruthBox> boxes) {
    out << "frame,x0,y0,x1,y1,id\n";
    for (const auto& g : boxes) {
        out << g.frame_index << ',' << g.box.x0 << ',' << g.box.y0 << ',' << g.box.x1 << ','
            << g.box.y1 << ',';
        if (g.object_id) {
            out << *g.object_id;
        }
        out << '\n';
    }
}

void write_gt(const std::filesystem::path& path, std::span<const GroundTruthBox> boxes) {
    auto f = open_out(path);
    write_gt(f, boxes);
}

void write_proposals(std::ostream& out, std::span<const FrameProposals> frames) {
    out << "frame,x0,y0,x1,y1\n";
    for (const auto& fr : frames) {
        for (const auto& b : fr.boxes) {
            out << fr.frame_index << ',' << b.box.x0 << ',' << b.box.y0 << ',' << b.box.x1 << ','
                << b.box.y1 << '\n';
        }
    }
}

void write_proposals(const std::filesystem::path& path, std::span<const FrameProposals> frames) {
    auto f = open_out(path);
    write_proposals(f, frames);
}

std::string Image::to_ppm() const {
    std::ostringstream os;
    os << "P6\n" << width_ << ' ' << height_ << "\n255\n";
    std::string bytes = os.str();
    bytes.reserve(bytes.size() + px_.size() * 3);
    for (const auto& p : px_) {
        bytes.push_back(static_cast<char>(p.r));
        bytes.push_back(static_cast<char>(p.g));
        bytes.push_back(static_cast<char>(p.b));
    }
    return bytes;
}

namespace {

void outline(Image& img, const Box& b, Rgb color) {
    const int x0 = std::max(0, b.x0);
    const int y0 = std::max(0, b.y0);
    const int x1 = std::min(img.width(), b.x1);
    const int y1 = std::min(img.height(), b.y1);
    if (x1 <= x0 || y1 <= y0) {
        return;
    }
    for (int x = x0; x < x1; ++x) {
        img.at(x, y0) = color;
        img.at(x, y1 - 1) = color;
    }
    for (int y = y0; y < y1; ++y) {
        img.at(x0, y) = color;
        img.at(x1 - 1, y) = color;
    }
}

}  // namespace

Image render_frame(std::span<const DvsEvent> events, std::span<const Box> proposals,
                   const SensorGeometry& geometry, std::span<const Box> gt) {
    Image img(geometry.width, geometry.height);
    for (const auto& e : events) {
        if (geometry.contains(e.x, e.y)) {
            img.at(e.x, e.y) = kWhite;
        }
    }
    for (const auto& b : gt) {
        outline(img, b, kGreen);
    }
    for (const auto& b : proposals) {
        outline(img, b, kRed);
    }
    return img;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    auto f = open_out(path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace snnrpn::io
