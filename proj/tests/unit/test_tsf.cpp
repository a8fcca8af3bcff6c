#include "coastal/errors.hpp"
#include "coastal/tsf.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

using namespace coastal;

namespace {

Snapshot sample_snapshot() {
    const TorusGrid g(8, 10, 2.0, 3.0);
    auto a = ScalarField::from_function(g, [](double x, double y) { return x + 10 * y; });
    auto b = ScalarField::from_function(g, [](double x, double y) { return x * y - 1.0; });
    return Snapshot{0.75, {a, b}};
}

template <class T>
T read_le(const std::vector<std::uint8_t>& bytes, std::size_t at) {
    T v{};
    std::memcpy(&v, bytes.data() + at, sizeof v);  // host is little-endian
    return v;
}

}  // namespace

TEST(Tsf, HeaderLayout) {
    const auto bytes = tsf::encode(sample_snapshot());
    ASSERT_EQ(bytes.size(), 4u + 3 * 4 + 3 * 8 + 2 * 80 * 8);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TSF1");
    EXPECT_EQ(read_le<std::uint32_t>(bytes, 4), 8u);
    EXPECT_EQ(read_le<std::uint32_t>(bytes, 8), 10u);
    EXPECT_EQ(read_le<std::uint32_t>(bytes, 12), 2u);
    EXPECT_EQ(read_le<double>(bytes, 16), 2.0);
    EXPECT_EQ(read_le<double>(bytes, 24), 3.0);
    EXPECT_EQ(read_le<double>(bytes, 32), 0.75);
    // first component, node (i=1, j=0) then (i=0, j=1): row-major along x
    EXPECT_EQ(read_le<double>(bytes, 40 + 8 * 1), 0.25);
    EXPECT_EQ(read_le<double>(bytes, 40 + 8 * 8), 10 * 0.3);
}

TEST(Tsf, FileRoundTripIsBitExact) {
    const auto snap = sample_snapshot();
    const auto path = std::filesystem::temp_directory_path() / "coastal_tsf_roundtrip.tsf";
    tsf::write(path, snap);
    const Snapshot back = tsf::read(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.components.size(), 2u);
    EXPECT_EQ(back.time, snap.time);
    EXPECT_TRUE(back.components[0].grid() == snap.components[0].grid());
    for (int c = 0; c < 2; ++c)
        for (std::size_t k = 0; k < snap.components[c].size(); ++k) EXPECT_EQ(back.components[c][k], snap.components[c][k]);
}

TEST(Tsf, RejectsCorruptInput) {
    auto bytes = tsf::encode(sample_snapshot());
    auto bad_magic = bytes;
    bad_magic[3] = '2';
    EXPECT_THROW(tsf::decode(bad_magic), DomainError);
    bytes.pop_back();
    EXPECT_THROW(tsf::decode(bytes), DomainError);
    EXPECT_THROW(tsf::decode({'T', 'S'}), DomainError);
    EXPECT_THROW(tsf::encode(Snapshot{0.0, {}}), DomainError);
}
