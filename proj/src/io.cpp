#include "bilap/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <thread>
#include <vector>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

constexpr char kMagic[6] = {'B', 'I', 'L', 'A', 'P', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u(const unsigned char* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

void set_problem(std::string* problem, const std::string& what) {
    if (problem) *problem = what;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string green_cache_filename(const LatticeDomain& domain, const Index& y) {
    std::string name = "green_n" + std::to_string(domain.dim()) + "_M" + std::to_string(domain.M());
    if (domain.unit_scale()) name += "_unit";
    name += "_y";
    for (int i = 0; i < domain.dim(); ++i) name += (i ? "_" : "") + std::to_string(y[i]);
    return name + ".bin";
}

void write_green_cache(const std::filesystem::path& file, const GridFunction& column, const Index& y) {
    const LatticeDomain& d = column.domain();
    const GridFunction c = column.box() == d.interior_box() ? column : column.restricted(d.interior_box());
    std::vector<unsigned char> buf(std::begin(kMagic), std::end(kMagic));
    buf.push_back(static_cast<unsigned char>(d.dim()));
    put_u32(buf, std::uint32_t(d.M()));
    for (int i = 0; i < d.dim(); ++i) put_u32(buf, std::uint32_t(y[i]));
    for (double v : c.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        put_u64(buf, bits);
    }
    put_u64(buf, fnv1a64(buf));

    std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path());
    auto tmp = file;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open cache file for writing: " + tmp.string());
        os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
        if (!os) throw Error("failed writing cache file: " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

std::optional<GridFunction> read_green_cache(const std::filesystem::path& file, const LatticeDomain& domain,
                                             const Index& y, std::string* problem) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return std::nullopt;
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    const int n = domain.dim();
    const std::size_t count = domain.interior_count();
    const std::size_t header = sizeof kMagic + 1 + 4 + 4 * std::size_t(n);
    const std::size_t expected = header + 8 * count + 8;
    if (buf.size() < header || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
        set_problem(problem, "bad magic in " + file.string());
        return std::nullopt;
    }
    if (buf.size() != expected) {
        set_problem(problem, "unexpected length of " + file.string());
        return std::nullopt;
    }
    const unsigned char* p = buf.data() + sizeof kMagic;
    bool match = p[0] == n && get_u(p + 1, 4) == std::uint64_t(domain.M());
    for (int i = 0; i < n && match; ++i) match = get_u(p + 5 + 4 * i, 4) == std::uint64_t(std::uint32_t(y[i]));
    if (!match) {
        set_problem(problem, "header mismatch in " + file.string());
        return std::nullopt;
    }
    const std::uint64_t stored = get_u(buf.data() + expected - 8, 8);
    if (stored != fnv1a64(std::span(buf.data(), expected - 8))) {
        set_problem(problem, "checksum mismatch in " + file.string());
        return std::nullopt;
    }
    GridFunction g = GridFunction::phi(domain);
    auto vals = g.values();
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t bits = get_u(buf.data() + header + 8 * i, 8);
        std::memcpy(&vals[i], &bits, sizeof bits);
    }
    return g;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_grid_csv(std::ostream& os, const GridFunction& f, const Box& box) {
    static const char* names[] = {"ix", "iy", "iz"};
    const int n = f.dim();
    for (int i = 0; i < n; ++i) os << names[i] << ',';
    os << "value\n";
    box.for_each([&](const Index& p) {
        for (int i = 0; i < n; ++i) os << p[i] << ',';
        os << format_double(f(p)) << '\n';
    });
}

}  // namespace bilap
