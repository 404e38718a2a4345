#pragma once

#include "ptn/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ptn {

constexpr int kFormatVersion = 1;

struct ParseError : Error {
  using Error::Error;
};

// Network document:
//   {"format_version": 1,
//    "vertices": [{"id": 0, "labels": [..], "sizes": [..], "data": [..]}, ..],
//    "edges": [{"label": 3, "size": 2, "endpoints": [0, 1]},
//              {"label": 7, "size": 2, "endpoints": [0]}, ..]}
// Data is row-major. An edge with one endpoint is dangling.
std::string network_to_string(const TensorNetwork& g);
TensorNetwork network_from_string(const std::string& text);
void save_network(const TensorNetwork& g, const std::string& path);
TensorNetwork load_network(const std::string& path);

struct Report {
  std::string model;
  std::vector<int> dims;
  double beta = 0;
  double alpha = 0;
  std::string ansatz;
  std::int64_t chi = 0;
  int partition_size = 0;
  std::int64_t swap_batch = 0;
  std::uint64_t seed = 0;
  bool closed = true;
  int sign = 1;
  double ln_z = 0;
  std::optional<double> rel_error;  // present iff the oracle ran
  std::uint64_t flops = 0;
  double seconds = 0;
  double analysis_seconds = 0;
};

// Field names of a report record, in output order.
const std::vector<std::string>& report_fields();

std::string report_json(const Report& r);  // one line, no newline
std::string report_csv_header();
std::string report_csv_row(const Report& r);

}  // namespace ptn
