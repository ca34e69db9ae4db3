#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "cosub/gibbs.hpp"

namespace cosub {

// One JSON document per retained sweep, newline delimited.
std::string trace_record_to_json(const TraceRecord& rec);
TraceRecord trace_record_from_json(const std::string& line, int expected_n);

// Streams trace.jsonl, invoking the visitor per record.
void for_each_trace_record(const std::string& path,
                           const std::function<void(const TraceRecord&)>& visit);

// FNV-1a over a string; used to fingerprint resolved hyperparameters.
std::string fnv1a_hex(const std::string& text);

}  // namespace cosub
