#include <doctest.h>

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "stackcnn/errors.hpp"
#include "stackcnn/events.hpp"
#include "stackcnn/rng.hpp"

using namespace stackcnn;

namespace {

EventStream roundtrip(const SensorGeometryHeader& header, const std::vector<Event>& events,
                      EventFormat format) {
    std::ostringstream out;
    write_events(out, header, events, format);
    std::istringstream in(out.str());
    return read_events(in, format);
}

std::vector<Event> random_sorted_events(std::size_t count, std::uint32_t width,
                                        std::uint32_t height, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Event> events(count);
    std::uint64_t t = 0;
    for (Event& e : events) {
        t += rng.below(50);
        e.t_us = t;
        e.x = static_cast<std::uint16_t>(rng.below(width));
        e.y = static_cast<std::uint16_t>(rng.below(height));
        e.polarity = rng.uniform() < 0.5 ? 1 : -1;
    }
    return events;
}

}  // namespace

TEST_SUITE("events") {

TEST_CASE("csv record maps straight onto the event fields") {
    std::istringstream in("# width=240 height=180\n0,5,7,1\n");
    const EventStream s = read_events(in, EventFormat::Csv);
    CHECK(s.header.width == 240);
    CHECK(s.header.height == 180);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0] == Event{0, 5, 7, 1});
}

TEST_CASE("coordinate at the resolution boundary is rejected") {
    std::istringstream in("# width=240 height=180\n0,240,7,1\n");
    CHECK_THROWS_WITH_AS(read_events(in, EventFormat::Csv),
                         doctest::Contains("coordinate"), FormatError);
}

TEST_CASE("timestamp regression is rejected with the line number") {
    std::istringstream in("# width=240 height=180\n100,1,1,1\n50,1,1,1\n");
    CHECK_THROWS_WITH_AS(read_events(in, EventFormat::Csv),
                         doctest::Contains("line 3"), FormatError);
}

TEST_CASE("regression within the declared tolerance passes") {
    std::istringstream in("# width=240 height=180\n100,1,1,1\n50,1,1,1\n");
    ReadOptions opts;
    opts.regression_tolerance_us = 60;
    CHECK(read_events(in, EventFormat::Csv, opts).events.size() == 2);
}

TEST_CASE("malformed csv records name the line") {
    std::istringstream a("# width=8 height=8\n1,2\n");
    CHECK_THROWS_WITH_AS(read_events(a, EventFormat::Csv), doctest::Contains("line 2"),
                         FormatError);
    std::istringstream b("# width=8 height=8\n1,2,3,7\n");
    CHECK_THROWS_WITH_AS(read_events(b, EventFormat::Csv), doctest::Contains("polarity"),
                         FormatError);
    std::istringstream c("width=8 height=8\n");
    CHECK_THROWS_AS(read_events(c, EventFormat::Csv), FormatError);
}

TEST_CASE("empty sequence writes a header-only csv file") {
    std::ostringstream out;
    write_events(out, SensorGeometryHeader{240, 180, 0}, {}, EventFormat::Csv);
    CHECK(out.str() == "# width=240 height=180\n");
}

TEST_CASE("binary layout is bit-exact") {
    std::ostringstream out;
    const std::vector<Event> events{Event{1, 0, 2, -1}};
    write_events(out, SensorGeometryHeader{2, 3, 0}, events, EventFormat::Binary);

    const unsigned char expected[] = {
        'E', 'V', 'S', '1',
        2, 0, 0, 0,              // width
        3, 0, 0, 0,              // height
        1, 0, 0, 0, 0, 0, 0, 0,  // count
        1, 0, 0, 0, 0, 0, 0, 0,  // t_us
        0, 0,                    // x
        2, 0,                    // y
        0xff,                    // polarity -1
    };
    const std::string got = out.str();
    REQUIRE(got.size() == sizeof expected);
    CHECK(std::memcmp(got.data(), expected, sizeof expected) == 0);

    std::istringstream in(got);
    const EventStream back = read_events(in, EventFormat::Binary);
    CHECK(back.events == events);
}

TEST_CASE("bad binary magic reports the offset") {
    std::istringstream in("EVX1garbage");
    CHECK_THROWS_WITH_AS(read_events(in, EventFormat::Binary), doctest::Contains("offset 0"),
                         FormatError);
}

TEST_CASE("truncated binary reports the failing record") {
    std::ostringstream out;
    write_events(out, SensorGeometryHeader{4, 4, 0},
                 std::vector<Event>{{1, 0, 0, 1}, {2, 1, 1, 1}}, EventFormat::Binary);
    const std::string whole = out.str();
    std::istringstream in(whole.substr(0, whole.size() - 5));
    CHECK_THROWS_WITH_AS(read_events(in, EventFormat::Binary), doctest::Contains("truncated"),
                         FormatError);
}

TEST_CASE("round-trip identity on a large random stream") {
    const auto events = random_sorted_events(1'000'000, 640, 480, 0xfeed);
    const SensorGeometryHeader header{640, 480, 0};
    for (EventFormat fmt : {EventFormat::Csv, EventFormat::Binary}) {
        const EventStream back = roundtrip(header, events, fmt);
        CHECK(back.header.width == header.width);
        CHECK(back.header.height == header.height);
        CHECK(back.events == events);
    }
}

TEST_CASE("format detection from leading bytes") {
    std::stringstream csv("# width=4 height=4\n");
    CHECK(detect_format(csv) == EventFormat::Csv);
    std::ostringstream bin;
    write_events(bin, SensorGeometryHeader{4, 4, 0}, {}, EventFormat::Binary);
    std::stringstream binin(bin.str());
    CHECK(detect_format(binin) == EventFormat::Binary);
    std::stringstream junk("hello");
    CHECK_THROWS_AS(detect_format(junk), FormatError);
}

TEST_CASE("window boundaries are half-open") {
    const std::uint64_t dt = 1000;
    const std::vector<Event> events{{0, 3, 4, 1}, {dt - 1, 3, 4, 1}, {dt, 3, 4, 1}};
    const auto frames =
        build_simil_frames(events, SensorGeometryHeader{8, 8, 2 * dt}, dt);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].counts(3, 4) == 2);
    CHECK(frames[1].counts(3, 4) == 1);
    CHECK(frames[0].t_start_us == 0);
    CHECK(frames[1].t_start_us == dt);
}

TEST_CASE("an empty stream over 3 dt yields three zero frames") {
    const auto frames =
        build_simil_frames({}, SensorGeometryHeader{8, 8, 3000}, 1000);
    REQUIRE(frames.size() == 3);
    for (const SimilFrame& f : frames) CHECK(f.counts.sum<std::uint64_t>() == 0);
}

TEST_CASE("positive_only keeps exactly the +1 events") {
    const auto events = random_sorted_events(5000, 16, 16, 99);
    std::size_t positives = 0;  // brute-force recount
    for (const Event& e : events)
        if (e.polarity == 1) ++positives;

    const SensorGeometryHeader header{16, 16, events.back().t_us + 1};
    const auto frames =
        build_simil_frames(events, header, 700, PolarityPolicy::PositiveOnly);
    std::uint64_t total = 0;
    for (const SimilFrame& f : frames) total += f.counts.sum<std::uint64_t>();
    CHECK(total == positives);
}

TEST_CASE("every event lands in exactly one frame") {
    const auto events = random_sorted_events(20000, 32, 32, 123);
    const std::uint64_t dt = 333;
    const SensorGeometryHeader header{32, 32, 0};
    const auto frames = build_simil_frames(events, header, dt);

    std::uint64_t total = 0;
    for (const SimilFrame& f : frames) total += f.counts.sum<std::uint64_t>();
    CHECK(total == events.size());

    for (const Event& e : events) {  // windowing partition, brute force
        std::size_t owners = 0;
        for (const SimilFrame& f : frames)
            if (e.t_us >= f.t_start_us && e.t_us < f.t_start_us + f.dt_us) ++owners;
        if (owners != 1) {
            CHECK(owners == 1);
            break;
        }
    }
}

TEST_CASE("dt = 0 is rejected") {
    CHECK_THROWS_AS(build_simil_frames({}, SensorGeometryHeader{8, 8, 100}, 0), ConfigError);
}

TEST_CASE("downsampling 240x180 by 3 gives 80x60 and conserves counts") {
    Rng rng(42);
    SimilFrame frame{CountGrid(240, 180), 0, 1000, false};
    for (auto& c : frame.counts.cells()) c = static_cast<std::uint32_t>(rng.below(5));

    const SimilFrame small = downsample(frame, 3);
    CHECK(small.counts.width() == 80);
    CHECK(small.counts.height() == 60);
    CHECK_FALSE(small.padded);
    CHECK(small.counts.sum<std::uint64_t>() == frame.counts.sum<std::uint64_t>());
}

TEST_CASE("downsampling by 1 is the identity") {
    SimilFrame frame{CountGrid(7, 5), 10, 20, false};
    frame.counts(3, 2) = 9;
    const SimilFrame same = downsample(frame, 1);
    CHECK(same.counts == frame.counts);
    CHECK(same.t_start_us == frame.t_start_us);
}

TEST_CASE("each output cell equals the brute-force block sum") {
    Rng rng(7);
    SimilFrame frame{CountGrid(6, 6), 0, 1, false};
    for (auto& c : frame.counts.cells()) c = static_cast<std::uint32_t>(rng.below(100));

    const SimilFrame small = downsample(frame, 3);
    REQUIRE(small.counts.width() == 2);
    REQUIRE(small.counts.height() == 2);
    for (int oy = 0; oy < 2; ++oy) {
        for (int ox = 0; ox < 2; ++ox) {
            std::uint32_t expect = 0;
            for (int dy = 0; dy < 3; ++dy)
                for (int dx = 0; dx < 3; ++dx) expect += frame.counts(3 * ox + dx, 3 * oy + dy);
            CHECK(small.counts(ox, oy) == expect);
        }
    }
    CHECK(small.counts.sum<std::uint64_t>() == frame.counts.sum<std::uint64_t>());
}

TEST_CASE("non-divisible dimensions zero-pad and set the flag") {
    SimilFrame frame{CountGrid(7, 5), 0, 1, false};
    frame.counts.fill(1);
    const SimilFrame small = downsample(frame, 3);
    CHECK(small.counts.width() == 3);
    CHECK(small.counts.height() == 2);
    CHECK(small.padded);
    CHECK(small.counts.sum<std::uint64_t>() == 35);  // padding adds nothing
}

TEST_CASE("downsample factor 0 is rejected") {
    SimilFrame frame{CountGrid(6, 6), 0, 1, false};
    CHECK_THROWS_AS(downsample(frame, 0), ConfigError);
}

}  // TEST_SUITE
