#pragma once

// Shared plumbing: error type, deterministic hashing, numeric helpers,
// and file utilities used across the library.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace h2sc {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// splitmix64: platform-independent hash/PRNG kernel. Used wherever the
// repo needs reproducible pseudo-randomness; std:: distributions are
// implementation-defined and would break byte-identical outputs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform double in [0,1) with 53 random bits.
inline double hash_unit(std::uint64_t x) {
    return double(splitmix64(x) >> 11) * 0x1.0p-53;
}

inline bool near_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool near_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Shortest exact decimal form of a double (round-trips via strtod).
// Negative zero is normalized so equal values always render identically.
inline std::string fmt_double(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail("cannot open file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Atomic publish: write to a sibling temp file, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
    namespace fs = std::filesystem;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail("cannot write file: " + tmp.string());
        out << content;
        if (!out.flush()) fail("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

} // namespace h2sc
