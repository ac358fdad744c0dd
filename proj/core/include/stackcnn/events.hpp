#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "stackcnn/grid.hpp"

namespace stackcnn {

/// One sensor event: a per-pixel brightness change at microsecond resolution.
struct Event {
    std::uint64_t t_us = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int8_t polarity = 1;  // +1 brightness increase, -1 decrease

    friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometryHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    /// Stream duration. Not persisted by the interchange formats; readers set
    /// it to one past the last event timestamp (0 for an empty stream).
    std::uint64_t duration_us = 0;

    friend bool operator==(const SensorGeometryHeader&, const SensorGeometryHeader&) = default;
};

/// Per-pixel event counts over one exposure window [t_start, t_start + dt).
struct SimilFrame {
    CountGrid counts;
    std::uint64_t t_start_us = 0;
    std::uint64_t dt_us = 0;
    bool padded = false;  // true when downsampling zero-padded the right/bottom edge
};

enum class EventFormat { Csv, Binary };

enum class PolarityPolicy {
    Both,          // every event counts +1 regardless of sign
    PositiveOnly,  // only polarity +1 events are counted
};

struct EventStream {
    SensorGeometryHeader header;
    std::vector<Event> events;
};

struct ReadOptions {
    /// Largest tolerated backward timestamp step; anything beyond is rejected.
    std::uint64_t regression_tolerance_us = 0;
};

// Interchange formats
//
// CSV:    header line "# width=<W> height=<H>", then one record per line
//         "t_us,x,y,p" with p in {1,-1}, sorted by t_us. UTF-8, LF endings.
// Binary: magic "EVS1", little-endian u32 width, u32 height, u64 event count,
//         then per event u64 t_us, u16 x, u16 y, i8 p. 13 bytes per event.
//
// read_events(write_events(h, E)) reproduces (width, height, E) bit-exactly.

EventStream read_events(std::istream& in, EventFormat format, const ReadOptions& opts = {});
void write_events(std::ostream& out, const SensorGeometryHeader& header,
                  std::span<const Event> events, EventFormat format);

/// Sniffs the format from the first bytes ("EVS1" magic vs. "#" header line).
EventFormat detect_format(std::istream& in);

EventStream read_events_file(const std::filesystem::path& path, const ReadOptions& opts = {});
void write_events_file(const std::filesystem::path& path, const SensorGeometryHeader& header,
                       std::span<const Event> events, EventFormat format);

/// Bins events into consecutive simil-frames of exposure dt. Frame k covers
/// [k*dt, (k+1)*dt); the sequence extends to cover header.duration_us and
/// every event, whichever is later. Events must be sorted by t.
std::vector<SimilFrame> build_simil_frames(std::span<const Event> events,
                                           const SensorGeometryHeader& header,
                                           std::uint64_t dt_us,
                                           PolarityPolicy policy = PolarityPolicy::Both);

/// Block-sum downsampling by an integer factor. Output cell = sum of the
/// factor x factor input block, so total counts are conserved. Dimensions that
/// do not divide evenly are zero-padded right/bottom and flagged via `padded`.
SimilFrame downsample(const SimilFrame& frame, int factor);

/// Grid dimensions after downsampling (ceil division).
std::pair<int, int> downsampled_dims(std::uint32_t width, std::uint32_t height, int factor);

}  // namespace stackcnn
