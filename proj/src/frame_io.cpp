// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/channel.hpp"

#include <bit>
#include <cstring>
#include <iomanip>
#include <map>
#include <sstream>

namespace xpmcap {

static_assert(std::endian::native == std::endian::little, "frame I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("frame: truncated input");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

std::string encode_frame(const SymbolFrame& frame) {
    std::string out = "XPMF";
    put<std::uint32_t>(out, 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(frame.num_users()));
    put<std::uint64_t>(out, frame.length());
    for (double p : frame.peak_power) put<double>(out, p);
    for (const auto& row : frame.symbols)
        for (const cd& s : row) {
            put<double>(out, s.real());
            put<double>(out, s.imag());
        }
    return out;
}

SymbolFrame decode_frame(const std::string& bytes) {
    if (bytes.size() < 4 || bytes.compare(0, 4, "XPMF") != 0) throw std::runtime_error("frame: bad magic");
    std::size_t pos = 4;
    if (take<std::uint32_t>(bytes, pos) != 1) throw std::runtime_error("frame: unsupported version");
    const auto users = take<std::uint32_t>(bytes, pos);
    const auto n = take<std::uint64_t>(bytes, pos);
    if (bytes.size() - pos != (users + users * n * 2) * sizeof(double)) throw std::runtime_error("frame: size mismatch");
    SymbolFrame f;
    for (std::uint32_t k = 0; k < users; ++k) f.peak_power.push_back(take<double>(bytes, pos));
    f.symbols.assign(users, cvec(n));
    for (auto& row : f.symbols)
        for (auto& s : row) {
            const double re = take<double>(bytes, pos);
            s = {re, take<double>(bytes, pos)};
        }
    return f;
}

std::string frame_csv(const SymbolFrame& frame) {
    std::ostringstream os;
    os << std::setprecision(17) << "user,index,re,im,peak_power_w\n";
    for (int k = 0; k < frame.num_users(); ++k)
        for (std::size_t i = 0; i < frame.length(); ++i)
            os << k + 1 << ',' << i + 1 << ',' << frame.symbols[k][i].real() << ',' << frame.symbols[k][i].imag() << ','
               << frame.peak_power[k] << '\n';
    return os.str();
}

SymbolFrame parse_frame_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "user,index,re,im,peak_power_w") throw std::runtime_error("frame csv: bad header");
    std::map<int, std::map<long, cd>> rows;
    std::map<int, double> peak;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int k;
        long i;
        double re, im, p;
        char c1, c2, c3, c4;
        std::istringstream ls(line);
        if (!(ls >> k >> c1 >> i >> c2 >> re >> c3 >> im >> c4 >> p)) throw std::runtime_error("frame csv: malformed row");
        rows[k][i] = {re, im};
        peak[k] = p;
    }
    SymbolFrame f;
    std::size_t n = rows.empty() ? 0 : rows.begin()->second.size();
    int expect_k = 1;
    for (const auto& [k, row] : rows) {
        if (k != expect_k++ || row.size() != n) throw std::runtime_error("frame csv: ragged or non-contiguous users");
        cvec v;
        long expect_i = 1;
        for (const auto& [i, s] : row) {
            if (i != expect_i++) throw std::runtime_error("frame csv: non-contiguous index");
            v.push_back(s);
        }
        f.symbols.push_back(std::move(v));
        f.peak_power.push_back(peak[k]);
    }
    return f;
}

}  // namespace xpmcap
