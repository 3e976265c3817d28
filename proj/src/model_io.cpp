#include "rcnet/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rcnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Section {
  std::string name;
  std::vector<std::vector<std::string>> rows;
};

std::vector<Section> tokenize_sections(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.front().front() == '[') {
      std::string name = tokens.front();
      if (name.back() != ']')
        throw std::runtime_error("malformed section header: " + name);
      sections.push_back({name.substr(1, name.size() - 2), {}});
      continue;
    }
    if (sections.empty())
      throw std::runtime_error("data before the first section header");
    sections.back().rows.push_back(tokens);
  }
  return sections;
}

double parse_rate(const std::string& tok) {
  if (tok == "inf" || tok == "Inf" || tok == "INF") return kInf;
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::runtime_error("bad number: " + tok);
  return v;
}

int parse_index(const std::string& tok, int limit, const char* what) {
  const long v = std::stol(tok);
  if (v < 1 || v > limit)
    throw std::runtime_error(std::string(what) + " id out of range: " + tok);
  return static_cast<int>(v - 1);
}

}  // namespace

std::string format_g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetworkModel parse_network(const std::string& text) {
  std::map<std::string, Section> by_name;
  for (Section& s : tokenize_sections(text)) {
    if (by_name.count(s.name))
      throw std::runtime_error("duplicate section [" + s.name + "]");
    by_name.emplace(s.name, std::move(s));
  }
  for (const auto& [name, s] : by_name)
    if (name != "topology" && name != "caches" && name != "files" &&
        name != "demand" && name != "availability")
      throw std::runtime_error("unknown section [" + name + "]");
  if (!by_name.count("caches") || !by_name.count("files"))
    throw std::runtime_error("network file needs [caches] and [files]");

  NetworkModel model;
  CacheNetwork& net = model.net;
  net.caches = static_cast<int>(by_name["caches"].rows.size());
  net.files = static_cast<int>(by_name["files"].rows.size());
  net.storage.resize(net.caches);
  net.service_rate.resize(net.caches);
  net.file_size.resize(net.files);
  net.adjacency = Eigen::MatrixXi::Zero(net.caches, net.caches);
  net.demand = Eigen::MatrixXd::Zero(net.caches, net.files);

  for (const auto& row : by_name["caches"].rows) {
    if (row.size() != 3)
      throw std::runtime_error("[caches] rows are: id storage eta");
    const int i = parse_index(row[0], net.caches, "cache");
    net.storage[i] = parse_rate(row[1]);
    net.service_rate[i] = parse_rate(row[2]);
  }
  for (const auto& row : by_name["files"].rows) {
    if (row.size() != 2)
      throw std::runtime_error("[files] rows are: id size");
    const int f = parse_index(row[0], net.files, "file");
    net.file_size[f] = parse_rate(row[1]);
  }
  if (by_name.count("topology"))
    for (const auto& row : by_name["topology"].rows) {
      if (row.size() != 2)
        throw std::runtime_error("[topology] rows are: from to");
      const int a = parse_index(row[0], net.caches, "cache");
      const int b = parse_index(row[1], net.caches, "cache");
      net.adjacency(a, b) = 1;
    }
  if (by_name.count("demand"))
    for (const auto& row : by_name["demand"].rows) {
      if (row.size() != 3)
        throw std::runtime_error("[demand] rows are: cache file rate");
      const int i = parse_index(row[0], net.caches, "cache");
      const int f = parse_index(row[1], net.files, "file");
      net.demand(i, f) = parse_rate(row[2]);
    }
  if (by_name.count("availability")) {
    model.has_availability = true;
    model.availability.pi = Eigen::MatrixXd::Zero(net.caches, net.files);
    for (const auto& row : by_name["availability"].rows) {
      if (row.size() != 3)
        throw std::runtime_error("[availability] rows are: cache file pi");
      const int i = parse_index(row[0], net.caches, "cache");
      const int f = parse_index(row[1], net.files, "file");
      model.availability.pi(i, f) = parse_rate(row[2]);
    }
  }
  return model;
}

NetworkModel load_network(const std::string& path) {
  return parse_network(read_text_file(path));
}

std::string write_network(const NetworkModel& model) {
  const CacheNetwork& net = model.net;
  std::string s;
  s += "[topology]\n";
  for (int i = 0; i < net.caches; ++i)
    for (int j = 0; j < net.caches; ++j)
      if (net.adjacency(i, j))
        s += std::to_string(i + 1) + " " + std::to_string(j + 1) + "\n";
  s += "[caches]\n";
  for (int i = 0; i < net.caches; ++i)
    s += std::to_string(i + 1) + " " + format_g12(net.storage[i]) + " " +
         (std::isfinite(net.service_rate[i]) ? format_g12(net.service_rate[i])
                                             : std::string("inf")) +
         "\n";
  s += "[files]\n";
  for (int f = 0; f < net.files; ++f)
    s += std::to_string(f + 1) + " " + format_g12(net.file_size[f]) + "\n";
  s += "[demand]\n";
  for (int i = 0; i < net.caches; ++i)
    for (int f = 0; f < net.files; ++f)
      if (net.demand(i, f) != 0.0)
        s += std::to_string(i + 1) + " " + std::to_string(f + 1) + " " +
             format_g12(net.demand(i, f)) + "\n";
  if (model.has_availability) {
    s += "[availability]\n";
    for (int i = 0; i < net.caches; ++i)
      for (int f = 0; f < net.files; ++f)
        if (model.availability.pi(i, f) != 0.0)
          s += std::to_string(i + 1) + " " + std::to_string(f + 1) + " " +
               format_g12(model.availability.pi(i, f)) + "\n";
  }
  return s;
}

KnapsackInstance parse_knapsack(const std::string& text) {
  KnapsackInstance kp;
  bool have_capacity = false;
  for (const Section& s : tokenize_sections(text)) {
    if (s.name != "knapsack")
      throw std::runtime_error("expected a [knapsack] section");
    for (const auto& row : s.rows) {
      if (row.size() == 2 && row[0] == "capacity") {
        kp.capacity = parse_rate(row[1]);
        have_capacity = true;
      } else if (row.size() == 2) {
        kp.weights.push_back(parse_rate(row[0]));
        kp.values.push_back(parse_rate(row[1]));
      } else {
        throw std::runtime_error(
            "[knapsack] rows are: 'capacity c' or 'weight value'");
      }
    }
  }
  if (!have_capacity || kp.weights.empty())
    throw std::runtime_error("knapsack instance needs capacity and items");
  return kp;
}

KnapsackInstance load_knapsack(const std::string& path) {
  return parse_knapsack(read_text_file(path));
}

PartitionInstance parse_partition(const std::string& text) {
  PartitionInstance pt;
  for (const Section& s : tokenize_sections(text)) {
    if (s.name != "partition")
      throw std::runtime_error("expected a [partition] section");
    for (const auto& row : s.rows)
      for (const std::string& tok : row) pt.values.push_back(std::stol(tok));
  }
  if (pt.values.empty())
    throw std::runtime_error("partition instance needs values");
  return pt;
}

PartitionInstance load_partition(const std::string& path) {
  return parse_partition(read_text_file(path));
}

}  // namespace rcnet
