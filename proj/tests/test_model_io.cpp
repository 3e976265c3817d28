#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rcnet/model_io.hpp"

using namespace rcnet;

namespace {

const char* kRing = R"(# two-cache ring
[topology]
1 2
2 1

[caches]
# id storage eta
1 4 4.0
2 4 inf

[files]
1 1

[demand]
1 1 1.0
2 1 1.0

[availability]
1 1 0.5
2 1 0.5
)";

}  // namespace

TEST_CASE("network file parsing") {
  const NetworkModel model = parse_network(kRing);
  CHECK(model.net.caches == 2);
  CHECK(model.net.files == 1);
  CHECK(model.net.adjacency(0, 1) == 1);
  CHECK(model.net.adjacency(1, 0) == 1);
  CHECK(model.net.storage[0] == doctest::Approx(4.0));
  CHECK(std::isinf(model.net.service_rate[1]));
  CHECK(model.net.demand(0, 0) == doctest::Approx(1.0));
  CHECK(model.has_availability);
  CHECK(model.availability.pi(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("network file round trip") {
  const NetworkModel model = parse_network(kRing);
  const std::string text = write_network(model);
  const NetworkModel again = parse_network(text);
  CHECK(again.net.adjacency == model.net.adjacency);
  CHECK(again.net.demand == model.net.demand);
  CHECK(again.net.storage == model.net.storage);
  CHECK(again.availability.pi == model.availability.pi);
  CHECK(write_network(again) == text);  // canonical form is a fixed point
}

TEST_CASE("malformed network files") {
  CHECK_THROWS(parse_network("[caches]\n1 4\n[files]\n1 1\n"));
  CHECK_THROWS(parse_network("1 2 3\n"));
  CHECK_THROWS(parse_network("[nonsense]\n1 2\n[caches]\n1 4 4\n[files]\n1 1\n"));
  CHECK_THROWS(parse_network("[caches]\n3 4 4\n[files]\n1 1\n"));
}

TEST_CASE("knapsack instance file") {
  const KnapsackInstance kp = parse_knapsack(
      "[knapsack]\ncapacity 5\n3 10\n4 6\n");
  CHECK(kp.capacity == doctest::Approx(5.0));
  REQUIRE(kp.weights.size() == 2);
  CHECK(kp.weights[1] == doctest::Approx(4.0));
  CHECK(kp.values[0] == doctest::Approx(10.0));
  CHECK_THROWS(parse_knapsack("[knapsack]\n3 10\n"));
}

TEST_CASE("partition instance file") {
  const PartitionInstance pt = parse_partition("[partition]\n1, 1, 2\n");
  REQUIRE(pt.values.size() == 3);
  CHECK(pt.values[2] == 2);
  CHECK_THROWS(parse_partition("[partition]\n"));
}

TEST_CASE("12 significant digit formatting") {
  CHECK(format_g12(0.5) == "0.5");
  CHECK(format_g12(1.0 / 3.0) == "0.333333333333");
  CHECK(format_g12(1234567.0) == "1234567");
}
