#pragma once

#include "spdcsim/biphoton.hpp"
#include "spdcsim/photon_stats.hpp"

#include <string>
#include <vector>

namespace spdcsim::io {

/// Deterministic "%.12g" number formatting shared by all writers.
std::string format_number(double v);

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

/// Waveform CSV (tau_ns, <value_name>).
void write_waveform_csv(const std::string& path, const Waveform& w,
                        const std::string& value_name = "density");

/// Flat binary event record: little-endian u64 picosecond timestamp + u8
/// channel, 9 bytes per event, no header.
void write_stream_binary(const std::string& path, const EventStream& stream);
EventStream read_stream_binary(const std::string& path, double duration);

/// Event CSV (t_ps, channel[, pair_id]).
void write_stream_csv(const std::string& path, const EventStream& stream,
                      bool include_truth = false);

void write_text(const std::string& path, const std::string& text);

} // namespace spdcsim::io
