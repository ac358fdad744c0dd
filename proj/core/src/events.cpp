#include "stackcnn/events.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "stackcnn/errors.hpp"

namespace stackcnn {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'S', '1'};

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw FormatError("csv line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_offset(std::uint64_t offset, const std::string& what) {
    throw FormatError("binary offset " + std::to_string(offset) + ": " + what);
}

// Strict unsigned decimal parse of the whole token.
template <typename T>
bool parse_uint(std::string_view token, T& out) {
    if (token.empty()) return false;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

void put_u16(std::ostream& out, std::uint16_t v) {
    std::array<char, 2> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b.data(), b.size());
}

std::uint64_t get_le(const unsigned char* p, int n) {
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void check_event(const Event& e, const SensorGeometryHeader& header, std::uint64_t prev_t,
                 bool have_prev, const ReadOptions& opts, std::size_t line,
                 std::uint64_t offset, bool binary) {
    auto fail = [&](const std::string& what) {
        binary ? fail_offset(offset, what) : fail_line(line, what);
    };
    if (e.x >= header.width || e.y >= header.height)
        fail("coordinate (" + std::to_string(e.x) + "," + std::to_string(e.y) +
             ") outside sensor resolution " + std::to_string(header.width) + "x" +
             std::to_string(header.height));
    if (have_prev && e.t_us + opts.regression_tolerance_us < prev_t)
        fail("timestamp regression: " + std::to_string(e.t_us) + " after " +
             std::to_string(prev_t));
}

EventStream read_csv(std::istream& in, const ReadOptions& opts) {
    EventStream stream;
    std::string line;
    std::size_t line_no = 1;

    if (!std::getline(in, line)) throw FormatError("csv line 1: missing header line");
    std::uint32_t w = 0, h = 0;
    int consumed = -1;
    if (std::sscanf(line.c_str(), "# width=%u height=%u%n", &w, &h, &consumed) != 2 ||
        consumed != static_cast<int>(line.size()))
        fail_line(1, "expected header '# width=<W> height=<H>', got '" + line + "'");
    if (w < 1 || h < 1) fail_line(1, "sensor resolution must be >= 1x1");
    stream.header.width = w;
    stream.header.height = h;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            if (in.peek() == std::istream::traits_type::eof()) break;
            fail_line(line_no, "empty record");
        }

        std::string_view sv(line);
        std::array<std::string_view, 4> field;
        for (int i = 0; i < 4; ++i) {
            const auto comma = sv.find(',');
            if (i < 3) {
                if (comma == std::string_view::npos) fail_line(line_no, "expected 4 fields t_us,x,y,p");
                field[i] = sv.substr(0, comma);
                sv.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos) fail_line(line_no, "expected 4 fields t_us,x,y,p");
                field[i] = sv;
            }
        }

        Event e;
        if (!parse_uint(field[0], e.t_us)) fail_line(line_no, "bad timestamp '" + std::string(field[0]) + "'");
        if (!parse_uint(field[1], e.x)) fail_line(line_no, "bad x '" + std::string(field[1]) + "'");
        if (!parse_uint(field[2], e.y)) fail_line(line_no, "bad y '" + std::string(field[2]) + "'");
        if (field[3] == "1")
            e.polarity = 1;
        else if (field[3] == "-1")
            e.polarity = -1;
        else
            fail_line(line_no, "polarity must be 1 or -1, got '" + std::string(field[3]) + "'");

        check_event(e, stream.header, stream.events.empty() ? 0 : stream.events.back().t_us,
                    !stream.events.empty(), opts, line_no, 0, false);
        stream.events.push_back(e);
    }

    stream.header.duration_us = stream.events.empty() ? 0 : stream.events.back().t_us + 1;
    return stream;
}

EventStream read_binary(std::istream& in, const ReadOptions& opts) {
    std::array<char, 20> head;
    in.read(head.data(), head.size());
    if (in.gcount() < 4 || std::memcmp(head.data(), kMagic, 4) != 0)
        fail_offset(0, "bad magic, expected 'EVS1'");
    if (in.gcount() != static_cast<std::streamsize>(head.size()))
        fail_offset(4, "truncated header");

    const auto* p = reinterpret_cast<const unsigned char*>(head.data());
    EventStream stream;
    stream.header.width = static_cast<std::uint32_t>(get_le(p + 4, 4));
    stream.header.height = static_cast<std::uint32_t>(get_le(p + 8, 4));
    const std::uint64_t count = get_le(p + 12, 8);
    if (stream.header.width < 1 || stream.header.height < 1)
        fail_offset(4, "sensor resolution must be >= 1x1");

    stream.events.reserve(count);
    std::array<char, 13> rec;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t offset = 20 + i * rec.size();
        in.read(rec.data(), rec.size());
        if (in.gcount() != static_cast<std::streamsize>(rec.size()))
            fail_offset(offset, "truncated event record " + std::to_string(i) + " of " +
                                    std::to_string(count));
        const auto* q = reinterpret_cast<const unsigned char*>(rec.data());
        Event e;
        e.t_us = get_le(q, 8);
        e.x = static_cast<std::uint16_t>(get_le(q + 8, 2));
        e.y = static_cast<std::uint16_t>(get_le(q + 10, 2));
        const auto pol = static_cast<std::int8_t>(q[12]);
        if (pol != 1 && pol != -1)
            fail_offset(offset + 12, "polarity must be 1 or -1, got " + std::to_string(pol));
        e.polarity = pol;
        check_event(e, stream.header, stream.events.empty() ? 0 : stream.events.back().t_us,
                    !stream.events.empty(), opts, 0, offset, true);
        stream.events.push_back(e);
    }

    stream.header.duration_us = stream.events.empty() ? 0 : stream.events.back().t_us + 1;
    return stream;
}

}  // namespace

EventStream read_events(std::istream& in, EventFormat format, const ReadOptions& opts) {
    return format == EventFormat::Csv ? read_csv(in, opts) : read_binary(in, opts);
}

void write_events(std::ostream& out, const SensorGeometryHeader& header,
                  std::span<const Event> events, EventFormat format) {
    if (header.width < 1 || header.height < 1)
        throw ConfigError("write_events: sensor resolution must be >= 1x1");
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (e.x >= header.width || e.y >= header.height)
            throw ConfigError("write_events: event " + std::to_string(i) + " outside sensor");
        if (i > 0 && e.t_us < events[i - 1].t_us)
            throw ConfigError("write_events: events not sorted by t at index " + std::to_string(i));
    }

    if (format == EventFormat::Csv) {
        std::string buf;
        buf.reserve(events.size() * 16 + 32);
        buf += "# width=" + std::to_string(header.width) +
               " height=" + std::to_string(header.height) + "\n";
        for (const Event& e : events) {
            buf += std::to_string(e.t_us);
            buf += ',';
            buf += std::to_string(e.x);
            buf += ',';
            buf += std::to_string(e.y);
            buf += ',';
            buf += (e.polarity > 0 ? "1" : "-1");
            buf += '\n';
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    } else {
        out.write(kMagic, 4);
        put_u32(out, header.width);
        put_u32(out, header.height);
        put_u64(out, events.size());
        for (const Event& e : events) {
            put_u64(out, e.t_us);
            put_u16(out, e.x);
            put_u16(out, e.y);
            out.put(static_cast<char>(e.polarity));
        }
    }
    if (!out) throw FormatError("write_events: output stream failure");
}

EventFormat detect_format(std::istream& in) {
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    const auto got = in.gcount();
    in.clear();
    in.seekg(0);
    if (got == 4 && std::memcmp(head.data(), kMagic, 4) == 0) return EventFormat::Binary;
    if (got >= 1 && head[0] == '#') return EventFormat::Csv;
    throw FormatError("binary offset 0: unrecognized event file (neither 'EVS1' magic nor '#' csv header)");
}

EventStream read_events_file(const std::filesystem::path& path, const ReadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return read_events(in, detect_format(in), opts);
}

void write_events_file(const std::filesystem::path& path, const SensorGeometryHeader& header,
                       std::span<const Event> events, EventFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    write_events(out, header, events, format);
}

std::vector<SimilFrame> build_simil_frames(std::span<const Event> events,
                                           const SensorGeometryHeader& header,
                                           std::uint64_t dt_us, PolarityPolicy policy) {
    if (dt_us == 0) throw ConfigError("build_simil_frames: dt must be > 0");
    if (header.width < 1 || header.height < 1)
        throw ConfigError("build_simil_frames: sensor resolution must be >= 1x1");

    std::uint64_t duration = header.duration_us;
    if (!events.empty()) duration = std::max(duration, events.back().t_us + 1);
    const std::uint64_t frame_count = (duration + dt_us - 1) / dt_us;

    std::vector<SimilFrame> frames;
    frames.reserve(frame_count);
    for (std::uint64_t k = 0; k < frame_count; ++k)
        frames.push_back(SimilFrame{
            CountGrid(static_cast<int>(header.width), static_cast<int>(header.height)),
            k * dt_us, dt_us, false});

    std::uint64_t prev_t = 0;
    bool have_prev = false;
    for (const Event& e : events) {
        if (have_prev && e.t_us < prev_t)
            throw ConfigError("build_simil_frames: events not sorted by t");
        prev_t = e.t_us;
        have_prev = true;
        if (e.x >= header.width || e.y >= header.height)
            throw ConfigError("build_simil_frames: event outside sensor resolution");
        if (policy == PolarityPolicy::PositiveOnly && e.polarity <= 0) continue;
        frames[e.t_us / dt_us].counts(e.x, e.y) += 1;
    }
    return frames;
}

std::pair<int, int> downsampled_dims(std::uint32_t width, std::uint32_t height, int factor) {
    if (factor < 1) throw ConfigError("downsample: factor must be >= 1");
    const auto f = static_cast<std::uint32_t>(factor);
    return {static_cast<int>((width + f - 1) / f), static_cast<int>((height + f - 1) / f)};
}

SimilFrame downsample(const SimilFrame& frame, int factor) {
    if (factor < 1) throw ConfigError("downsample: factor must be >= 1");
    const int w = frame.counts.width();
    const int h = frame.counts.height();
    const auto [ow, oh] = downsampled_dims(static_cast<std::uint32_t>(w),
                                           static_cast<std::uint32_t>(h), factor);

    SimilFrame out{CountGrid(ow, oh), frame.t_start_us, frame.dt_us,
                   frame.padded || (w % factor != 0) || (h % factor != 0)};
    for (int y = 0; y < h; ++y) {
        const std::uint32_t* src = frame.counts.row(y);
        std::uint32_t* dst = out.counts.row(y / factor);
        for (int x = 0; x < w; ++x) dst[x / factor] += src[x];
    }
    return out;
}

}  // namespace stackcnn
