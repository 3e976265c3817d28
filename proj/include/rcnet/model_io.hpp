#pragma once

#include <string>

#include "rcnet/network.hpp"
#include "rcnet/placement.hpp"

namespace rcnet {

// Network description file, plain text with '#' comments and sections:
//   [topology]      from to            (one directed link per line)
//   [caches]        id storage eta     (eta may be "inf")
//   [files]         id size
//   [demand]        cache file rate
//   [availability]  cache file pi      (optional; binary entries = placement)
// Ids are 1-based.
struct NetworkModel {
  CacheNetwork net;
  AvailabilityProfile availability;
  bool has_availability = false;
};

NetworkModel parse_network(const std::string& text);
NetworkModel load_network(const std::string& path);
std::string write_network(const NetworkModel& model);

// [knapsack]: "capacity <c>" then one "weight value" pair per line.
KnapsackInstance parse_knapsack(const std::string& text);
KnapsackInstance load_knapsack(const std::string& path);

// [partition]: whitespace/comma separated positive integers.
PartitionInstance parse_partition(const std::string& text);
PartitionInstance load_partition(const std::string& path);

// All floating output is printed with 12 significant digits.
std::string format_g12(double x);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace rcnet
