#include "spdcsim/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace spdcsim::io {

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path, std::ios_base::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

} // namespace

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows)
{
    auto out = open_out(path);
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

void write_waveform_csv(const std::string& path, const Waveform& w, const std::string& value_name)
{
    auto out = open_out(path);
    out << "tau_ns," << value_name << '\n';
    for (std::size_t i = 0; i < w.tau.size(); ++i)
        out << format_number(w.tau[i] * 1e9) << ',' << format_number(w.value[i]) << '\n';
}

void write_stream_binary(const std::string& path, const EventStream& stream)
{
    auto out = open_out(path, std::ios::out | std::ios::binary);
    for (const Event& e : stream.events) {
        const auto t = (std::uint64_t)e.t_ps;
        unsigned char rec[9];
        for (int i = 0; i < 8; ++i)
            rec[i] = (unsigned char)(t >> (8 * i));
        rec[8] = (unsigned char)e.channel;
        out.write((const char*)rec, 9);
    }
}

EventStream read_stream_binary(const std::string& path, double duration)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read '" + path + "'");
    EventStream stream;
    stream.duration = duration;
    stream.has_truth = false;
    unsigned char rec[9];
    while (in.read((char*)rec, 9)) {
        std::uint64_t t = 0;
        for (int i = 0; i < 8; ++i)
            t |= (std::uint64_t)rec[i] << (8 * i);
        if (rec[8] > 2)
            throw std::runtime_error("corrupt event record in '" + path + "'");
        stream.events.push_back({(std::int64_t)t, (Channel)rec[8], -1});
    }
    return stream;
}

void write_stream_csv(const std::string& path, const EventStream& stream, bool include_truth)
{
    auto out = open_out(path);
    out << (include_truth ? "t_ps,channel,pair_id" : "t_ps,channel") << '\n';
    for (const Event& e : stream.events) {
        out << e.t_ps << ',' << (int)e.channel;
        if (include_truth)
            out << ',' << e.pair_id;
        out << '\n';
    }
}

void write_text(const std::string& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
}

} // namespace spdcsim::io
