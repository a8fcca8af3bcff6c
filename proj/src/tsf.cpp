#include "coastal/tsf.hpp"

#include "coastal/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace coastal::tsf {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'F', '1'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 3 * 8;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(raw[sizeof(T) - 1 - k]);
    } else {
        out.insert(out.end(), raw, raw + sizeof(T));
    }
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw DomainError("TSF1: truncated data");
    std::uint8_t raw[sizeof(T)];
    for (std::size_t k = 0; k < sizeof(T); ++k) {
        raw[k] = (std::endian::native == std::endian::big) ? in[pos + sizeof(T) - 1 - k] : in[pos + k];
    }
    pos += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
}

}  // namespace

std::vector<std::uint8_t> encode(const Snapshot& snapshot) {
    if (snapshot.components.empty()) throw DomainError("TSF1: snapshot has no components");
    const TorusGrid& grid = snapshot.components.front().grid();
    for (const auto& c : snapshot.components) require_same_grid(grid, c.grid(), "TSF1 encode");

    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + snapshot.components.size() * grid.size() * 8);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.nx()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.ny()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(snapshot.components.size()));
    put_le<double>(out, grid.lx());
    put_le<double>(out, grid.ly());
    put_le<double>(out, snapshot.time);
    for (const auto& c : snapshot.components) {
        for (double v : c.values()) put_le<double>(out, v);
    }
    return out;
}

Snapshot decode(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw DomainError("TSF1: bad magic");
    }
    std::size_t pos = 4;
    const auto nx = get_le<std::uint32_t>(bytes, pos);
    const auto ny = get_le<std::uint32_t>(bytes, pos);
    const auto ncomp = get_le<std::uint32_t>(bytes, pos);
    const double lx = get_le<double>(bytes, pos);
    const double ly = get_le<double>(bytes, pos);
    Snapshot snap;
    snap.time = get_le<double>(bytes, pos);
    const TorusGrid grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    if (bytes.size() != kHeaderBytes + static_cast<std::size_t>(ncomp) * grid.size() * 8) {
        throw DomainError("TSF1: payload size does not match header");
    }
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        std::vector<double> values(grid.size());
        for (double& v : values) v = get_le<double>(bytes, pos);
        snap.components.emplace_back(grid, std::move(values));
    }
    return snap;
}

void write(const std::filesystem::path& path, const Snapshot& snapshot) {
    const auto bytes = encode(snapshot);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("TSF1: cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DomainError("TSF1: write failed for " + path.string());
}

Snapshot read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("TSF1: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes);
}

}  // namespace coastal::tsf
