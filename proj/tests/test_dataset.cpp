#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "causal_boot/dataset.hpp"
#include "causal_boot/errors.hpp"

using namespace causal_boot;

namespace {

Dataset sample() {
  Dataset d;
  d.dim = 2;
  d.x = {0.1, -2.5, 1e-7, 3.0, 0.3333333333333333, 12.75};
  d.y = {1, 0, 1};
  d.u = std::vector<int>{0, 1, 1};
  d.z = std::vector<int>{1, 1, 0};
  d.shadow["v"] = {1, 0, 0};
  return d;
}

}  // namespace

TEST_CASE("csv round-trip is exact") {
  const Dataset d = sample();
  std::ostringstream out;
  write_csv(out, d);
  CHECK(out.str().substr(0, out.str().find('\n')) == "x0,x1,y,u,z,_v");
  std::istringstream in(out.str());
  const Dataset back = read_csv(in);
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  CHECK(back.u == d.u);
  CHECK(back.z == d.z);
  CHECK_FALSE(back.d.has_value());
  CHECK(back.shadow == d.shadow);
}

TEST_CASE("csv without covariates holds only x and y") {
  std::ostringstream out;
  write_csv(out, sample(), false, false);
  std::istringstream in(out.str());
  const Dataset back = read_csv(in);
  CHECK(out.str().substr(0, out.str().find('\n')) == "x0,x1,y");
  CHECK_FALSE(back.u.has_value());
  CHECK(back.shadow.empty());
}

TEST_CASE("csv errors") {
  std::istringstream bad_header("a,b\n1,2\n");
  CHECK_THROWS(read_csv(bad_header));
  std::istringstream short_row("x0,y\n1.0\n");
  CHECK_THROWS(read_csv(short_row));
  std::istringstream bad_label("x0,y\n1.0,-1\n");
  CHECK_THROWS(read_csv(bad_label));
  std::istringstream bad_real("x0,y\nabc,1\n");
  CHECK_THROWS(read_csv(bad_real));
}

TEST_CASE("column access") {
  const Dataset d = sample();
  CHECK(d.has_column("u"));
  CHECK_FALSE(d.has_column("d"));
  CHECK(d.discrete("z") == std::vector<int>{1, 1, 0});
  CHECK_THROWS_AS(d.discrete("d"), MissingColumnError);
  CHECK_THROWS_AS(d.discrete("x"), InvalidArgument);
  CHECK_THROWS_AS(d.covariate("v"), MissingColumnError);
  CHECK(column_domain(std::vector<int>{0, 0}) == 2);
  CHECK(column_domain(std::vector<int>{0, 4}) == 5);
}

TEST_CASE("validate catches ragged columns") {
  Dataset d = sample();
  d.u->pop_back();
  CHECK_THROWS(d.validate());
}

TEST_CASE("format_real is shortest round-trip") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(2.0) == "2");
  for (double v : {1.0 / 3.0, 1e-300, -123456.789, 5e-324}) CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
}
