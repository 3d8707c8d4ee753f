#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcfe/io.hpp"
#include "support/fixtures.hpp"

using namespace rcfe;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("bundled z-channel spec parses to the worked example") {
  const Channel ch = load_channel(std::string(RCFE_SOURCE_DIR) +
                                  "/data/zchannel.spec");
  CHECK(ch.input_size() == 2);
  CHECK(ch.output_size() == 2);
  CHECK(ch.transition()(0, 0) == 1.0);
  CHECK(ch.transition()(0, 1) == 0.0);
  CHECK(ch.transition()(1, 0) == 0.45);
  CHECK(ch.transition()(1, 1) == 0.55);
  CHECK(ch.input_dist()[0] == 0.5);
  CHECK(ch.input_labels() == std::vector<std::string>{"0", "1"});
}

TEST_CASE("channel spec validation failures") {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return parse_channel_spec(is);
  };

  CHECK_THROWS_AS(parse("input_alphabet: a b\n"
                        "output_alphabet: 0 1\n"
                        "P_X: 0.5 0.5\n"
                        "W: 0.6 0.5\n"
                        "W: 0.5 0.5\n"),
                  ValidationError);
  // Zero-mass input letter is rejected, not silently carried.
  CHECK_THROWS_AS(parse("input_alphabet: a b\n"
                        "output_alphabet: 0 1\n"
                        "P_X: 1.0 0.0\n"
                        "W: 0.5 0.5\n"
                        "W: 0.5 0.5\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("input_alphabet: a\n"
                        "output_alphabet: 0 1\n"
                        "P_X: 1.0\n"
                        "W: 0.5 0.5\n"
                        "W: 0.5 0.5\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("output_alphabet: 0 1\nP_X: 1.0\nW: 1 0\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("input_alphabet: a\n"
                        "output_alphabet: 0 1\n"
                        "P_X: not_a_number\n"
                        "W: 0.5 0.5\n"),
                  ValidationError);
  CHECK_THROWS_AS(load_channel("/nonexistent/missing.spec"), ValidationError);

  // Comments and blank lines are fine.
  const Channel ok = parse("# full spec\n"
                           "input_alphabet: a b\n\n"
                           "output_alphabet: 0 1  # two outputs\n"
                           "P_X: 0.25 0.75\n"
                           "W: 1 0\n"
                           "W: 0.5 0.5\n");
  CHECK(ok.input_dist()[1] == 0.75);
}

TEST_CASE("format_sig renders 12 significant digits with '.' decimal") {
  CHECK(format_sig(0.2440993704973965) == "0.244099370497");
  CHECK(format_sig(1.0) == "1");
  CHECK(format_sig(-1.0 / 3.0) == "-0.333333333333");
  CHECK(format_sig(1e-17).find('e') != std::string::npos);
}

TEST_CASE("curve csv serialization is deterministic") {
  CurveTable table;
  table.axis_name = "beta";
  table.axis = {1.0, 2.0};
  table.column_names = {"a", "b"};
  table.columns = {{0.1, 0.2}, {0.5441811864, -1.0 / 3.0}};
  table.channel_hash = 0xabcdef;
  table.config_summary = "grid_points=21";
  table.seed = 42;

  const std::string path = "/tmp/rcfe_test_curve.csv";
  write_curve_csv(path, table);
  const std::string first = slurp(path);
  write_curve_csv(path, table);
  CHECK(first == slurp(path));
  CHECK(first.find("beta,a,b\n") == 0);
  CHECK(first.find("0.5441811864") != std::string::npos);
  CHECK(first.find("-0.333333333333") != std::string::npos);

  const std::string meta = slurp(path + ".meta");
  CHECK(meta.find("channel_hash: 0000000000abcdef") != std::string::npos);
  CHECK(meta.find("seed: 42") != std::string::npos);
  CHECK(meta.find("version: ") != std::string::npos);
  std::remove(path.c_str());
  std::remove((path + ".meta").c_str());
}

TEST_CASE("manifest preserves key order") {
  KeyValueDoc doc;
  doc.add("tool", "rcfe");
  doc.add("subcommand", "phase");
  doc.add("beta", "2");
  CHECK(doc.render() == "tool: rcfe\nsubcommand: phase\nbeta: 2\n");
}

TEST_CASE("channel hash distinguishes channels and is stable") {
  const Channel a = rcfe::testing::z_channel();
  const Channel b = rcfe::testing::z_channel();
  const Channel c = rcfe::testing::bsc(0.11);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}
